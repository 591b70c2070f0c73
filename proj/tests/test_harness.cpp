#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tshuffle/harness.hpp"

using namespace tshuffle;

namespace {

ExperimentPlan small_plan() {
    ExperimentPlan plan;
    plan.strategy = Strategy::qp_baseline;
    plan.n_grid = {8};
    plan.reps = 1;
    plan.master_seed = 404;
    return plan;
}

}  // namespace

TEST_CASE("format parsing") {
    CHECK(parse_format("csv") == OutputFormat::csv);
    CHECK(parse_format("json") == OutputFormat::json);
    CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}

TEST_CASE("plan validation") {
    CHECK_NOTHROW(small_plan().validate());
    ExperimentPlan p = small_plan();
    p.reps = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = small_plan();
    p.n_grid = {};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = small_plan();
    p.n_grid = {16, 16};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = small_plan();
    p.n_grid = {32, 16};
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("a one-replicate plan yields one row and one summary") {
    const ScalingResult r = run_scaling(small_plan());
    CHECK(r.rows.size() == 1);
    REQUIRE(r.summaries.size() == 1);
    CHECK(r.summaries[0].n == 8);
    CHECK(r.summaries[0].coupling_time.count == 1);
    CHECK(r.summaries[0].capacity_errors == 0);
}

TEST_CASE("identical plans produce identical CSV bytes") {
    ExperimentPlan plan = small_plan();
    plan.n_grid = {8, 12};
    plan.reps = 5;
    std::ostringstream a, b;
    write_scaling_csv(run_scaling(plan), a);
    write_scaling_csv(run_scaling(plan), b);
    CHECK(a.str() == b.str());
    CHECK(!a.str().empty());
}

TEST_CASE("scaling means roughly quadruple per doubling for the plain baseline") {
    ExperimentPlan plan = small_plan();
    plan.n_grid = {16, 32, 64};
    plan.reps = 300;
    const ScalingResult r = run_scaling(plan);
    REQUIRE(r.summaries.size() == 3);
    for (std::size_t i = 1; i < 3; ++i) {
        const double ratio = r.summaries[i].coupling_time.mean /
                             r.summaries[i - 1].coupling_time.mean;
        CHECK(ratio > 3.0);
        CHECK(ratio < 5.0);
    }
}

TEST_CASE("CSV schema and 12-significant-digit reals") {
    ExperimentPlan plan = small_plan();
    plan.epsilon = 0.2;
    plan.kappa = 0.5;
    std::ostringstream os;
    write_scaling_csv(run_scaling(plan), os);
    const std::string text = os.str();
    const std::string header =
        "strategy,n,eps,kappa,master_seed,rep,coupling_time,events_total,"
        "maps_created,maps_non_reusable";
    CHECK(text.substr(0, header.size()) == header);
    CHECK(text.find("qp,8,") != std::string::npos);

    CHECK(format_real(1.0 / 3.0) == "0.333333333333");
    CHECK(format_real(1024.0) == "1024");
    CHECK(format_real(0.5) == "0.5");
}

TEST_CASE("JSON output embeds the plan and parses") {
    ExperimentPlan plan = small_plan();
    plan.reps = 3;
    std::ostringstream os;
    write_scaling_json(run_scaling(plan), os);
    const nlohmann::json j = nlohmann::json::parse(os.str());
    CHECK(j["plan"]["strategy"] == "qp");
    CHECK(j["plan"]["master_seed"] == 404);
    CHECK(j["plan"]["eps"].get<double>() == doctest::Approx(0.2));
    CHECK(j["plan"]["kappa"].get<double>() == doctest::Approx(0.5));
    CHECK(j["rows"].size() == 3);
    CHECK(j["summaries"].size() == 1);
}

TEST_CASE("thread count does not change the result") {
    ExperimentPlan plan = small_plan();
    plan.strategy = Strategy::superfast;
    plan.n_grid = {8, 16};
    plan.reps = 6;
    plan.threads = 1;
    std::ostringstream a;
    write_scaling_csv(run_scaling(plan), a);
    plan.threads = 3;
    std::ostringstream b;
    write_scaling_csv(run_scaling(plan), b);
    CHECK(a.str() == b.str());
}

TEST_CASE("exact class-kernel CSV renders rationals") {
    std::ostringstream os;
    write_lumped_kernel_csv(3, os);
    const std::string text = os.str();
    CHECK(text.find("1/3") != std::string::npos);
    CHECK(text.find("2/3") != std::string::npos);
    CHECK(text.find("1+1+1") != std::string::npos);
}

TEST_CASE("mixing profile values and degenerate threshold") {
    const MixingProfile p = mixing_profile(3, 0.25);
    REQUIRE(p.tv.size() >= 3);
    CHECK(p.tv[0] == doctest::Approx(1.0 / 3));
    CHECK(p.tv[1] == doctest::Approx(5.0 / 54));
    CHECK(p.tv[2] == doctest::Approx(1.0 / 27));
    CHECK(p.mixing_time == 2);  // 5/54 < 0.25 first at m=2
    CHECK(p.ratio_to_n_log_n == doctest::Approx(2 / (3 * std::log(3.0))));

    CHECK(mixing_profile(3, 1.0).mixing_time == 0);
    CHECK(mixing_profile(3, 1.5).mixing_time == 0);
}
