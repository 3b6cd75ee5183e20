#include <algorithm>
#include <filesystem>
#include <random>

#include "bundled.hpp"
#include "doctest.h"
#include "stormgrid/error.hpp"
#include "stormgrid/pipeline.hpp"

using namespace stormgrid;
namespace fs = std::filesystem;

namespace {

std::vector<int> ranking(const ResilienceReport& r) {
    std::vector<int> ids;
    for (const auto& c : r.corridors) ids.push_back(c.corridor_id);
    return ids;
}

}  // namespace

TEST_CASE("forced unit coefficients reproduce the model-driven run exactly") {
    auto cfg = bundled_config();
    const auto inputs = load_inputs(cfg);
    const auto weights = compute_weights(cfg);
    cfg.force_unit_k = true;
    const auto model = correction_model(cfg, weights.selected());
    const auto forced = compute_failures(cfg, inputs, &model, false);
    const auto plain = compute_failures(cfg, inputs, nullptr, false);
    REQUIRE(forced.hybrid.size() == plain.model.size());
    for (std::size_t w = 0; w < plain.model.size(); ++w)
        for (std::size_t c = 0; c < plain.model[w].size(); ++c) {
            CHECK(forced.hybrid[w][c] == plain.model[w][c]);
            CHECK(forced.model[w][c] == plain.model[w][c]);
        }

    auto hybrid_cfg = bundled_config();
    hybrid_cfg.force_unit_k = true;
    auto model_cfg = bundled_config();
    model_cfg.mode = RunMode::ModelDriven;
    const auto a = run_pipeline("assess", hybrid_cfg);
    const auto b = run_pipeline("assess", model_cfg);
    auto body = [](const std::string& s) { return s.substr(s.find("r_sys_mw")); };
    CHECK(body(a.artifacts.at("resilience.txt")) == body(b.artifacts.at("resilience.txt")));
}

TEST_CASE("corridor ranking survives small probability perturbations") {
    const auto cfg = bundled_config();
    const auto inputs = load_inputs(cfg);
    const auto weights = compute_weights(cfg);
    const auto model = correction_model(cfg, weights.selected());
    const auto f = compute_failures(cfg, inputs, &model, false);
    StateEnumeration table(inputs.network.corridors.size(), cfg.order);
    table.evaluate(load_shed_impact(inputs.network));
    const auto base = assess_resilience(inputs.network, table, f.hybrid, f.scenario_weights);
    std::map<int, double> value;
    for (const auto& c : base.corridors) value[c.corridor_id] = c.value;

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    for (int trial = 0; trial < 10; ++trial) {
        auto p = f.hybrid;
        for (auto& row : p)
            for (double& x : row) x = std::clamp(x * (1 + u(rng)), 0.0, 1.0);
        const auto r = assess_resilience(inputs.network, table, p, f.scenario_weights);
        CHECK(r.corridors.front().corridor_id == base.corridors.front().corridor_id);
        std::map<int, std::size_t> pos;
        const auto ids = ranking(r);
        for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = i;
        // pairs separated by more than 5% keep their order
        for (const auto& [a, va] : value)
            for (const auto& [b, vb] : value)
                if (va > 1.05 * vb && va > 0) CHECK(pos[a] < pos[b]);
    }
}

TEST_CASE("assess is deterministic across thread counts") {
    auto one = bundled_config();
    auto three = bundled_config();
    three.threads = 3;
    const auto a = run_pipeline("assess", one);
    const auto b = run_pipeline("assess", three);
    CHECK(a.artifacts == b.artifacts);
    CHECK(a.artifacts.at("resilience.txt").find("order\t2") != std::string::npos);
}

TEST_CASE("published schemes select the Gini scheme") {
    auto cfg = bundled_config();
    cfg.schemes = std::string(STORMGRID_DATA_DIR) + "/reference/schemes.csv";
    const auto w = compute_weights(cfg);
    CHECK(w.selected().name == "Scheme1");
    REQUIRE(w.ahp.has_value());
    CHECK(w.ahp->acceptable());
}

TEST_CASE("bad configuration is rejected before any work") {
    auto cfg = bundled_config();
    cfg.trees = 0;
    CHECK_THROWS_AS(run_pipeline("weights", cfg), Error);
    cfg = bundled_config();
    cfg.buses = "/nonexistent/buses.csv";
    try {
        run_pipeline("assess", cfg);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("stage 'config'") != std::string::npos);
    }
    CHECK_THROWS_AS(run_pipeline("explode", bundled_config()), Error);
}

TEST_CASE("artifacts are written atomically") {
    const auto dir = fs::temp_directory_path() / "stormgrid_pipeline_test";
    fs::remove_all(dir);
    write_artifacts(dir, {{"a.txt", "alpha\n"}, {"b.txt", "beta\n"}});
    CHECK(fs::exists(dir / "a.txt"));
    CHECK(fs::file_size(dir / "b.txt") == 5);
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".partial");
    fs::remove_all(dir);
}

TEST_CASE("manifest digests ignore thread count") {
    auto a = bundled_config();
    auto b = bundled_config();
    b.threads = 4;
    CHECK(a.canonical_text() == b.canonical_text());
    b.seed = 12;
    CHECK(a.canonical_text() != b.canonical_text());
}
