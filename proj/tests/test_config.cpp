#include <string>

#include "doctest.h"
#include "mseg/config.hpp"
#include "mseg/errors.hpp"

TEST_CASE("an empty config yields the defaults") {
    const auto cfg = mseg::parse_config("");
    CHECK(cfg.smoothing_window_s == 0.5);
    CHECK(cfg.ema.dilation_step_s == 0.25);
    CHECK(cfg.ema.min_window_s == 1.0);
    CHECK(cfg.ema.max_window_s == 15.0);
    CHECK(cfg.ema.event_energy_threshold == 4.0);
    CHECK(cfg.heuristics.k_sigma == 2.0);
    CHECK(cfg.pca_components == 10);
    CHECK(cfg.rf_trees == 50);
    CHECK(cfg.match_iou_min == 0.3);
    CHECK(cfg.seed == 1);
    CHECK(cfg.synth.seed == cfg.seed);
}

TEST_CASE("values, comments and sections parse") {
    const std::string toml =
        "# pipeline settings\n"
        "seed = 99\n"
        "\n"
        "[ema]\n"
        "max_window_s = 12.0  # shorter dilation cap\n"
        "time_stride_s = 0.25\n"
        "\n"
        "[synth]\n"
        "trip_id = \"bench\"\n"
        "adversarial_curve_turn = true\n";
    const auto cfg = mseg::parse_config(toml);
    CHECK(cfg.seed == 99);
    CHECK(cfg.ema.max_window_s == 12.0);
    CHECK(cfg.ema.time_stride_s == 0.25);
    CHECK(cfg.synth.trip_id == "bench");
    CHECK(cfg.synth.adversarial_curve_turn);
    // The top-level seed flows into the generator seed.
    CHECK(cfg.synth.seed == 99);
    // Untouched keys keep their defaults.
    CHECK(cfg.ema.min_window_s == 1.0);
}

TEST_CASE("unknown keys are rejected by name") {
    CHECK_THROWS_WITH_AS(mseg::parse_config("[ema]\nwindow_s = 3\n"),
                         doctest::Contains("ema.window_s"), mseg::ConfigError);
    CHECK_THROWS_AS(mseg::parse_config("typo = 1\n"), mseg::ConfigError);
}

TEST_CASE("malformed lines and duplicates are rejected") {
    CHECK_THROWS_AS(mseg::parse_config("just some text\n"), mseg::ConfigError);
    CHECK_THROWS_AS(mseg::parse_config("[ema\nmin_window_s = 1\n"), mseg::ConfigError);
    CHECK_THROWS_AS(mseg::parse_config("seed = 1\nseed = 2\n"), mseg::ConfigError);
    CHECK_THROWS_AS(mseg::parse_config("seed = abc\n"), mseg::ConfigError);
    CHECK_THROWS_AS(mseg::parse_config("[ema]\nmin_window_s = fast\n"), mseg::ConfigError);
    CHECK_THROWS_AS(mseg::parse_config("[synth]\nadversarial_curve_turn = yes\n"),
                    mseg::ConfigError);
}

TEST_CASE("out-of-range values fail validation") {
    CHECK_THROWS_AS(mseg::parse_config("[ema]\nmin_window_s = 20.0\n"), mseg::ConfigError);
    CHECK_THROWS_AS(mseg::parse_config("[features]\npca_components = 0\n"), mseg::ConfigError);
    CHECK_THROWS_AS(mseg::parse_config("[metrics]\nmatch_iou_min = 1.5\n"), mseg::ConfigError);
}

TEST_CASE("serialization round trips through the parser") {
    mseg::PipelineConfig cfg;
    cfg.seed = 1234;
    cfg.ema.max_window_s = 9.75;
    cfg.heuristics.stop_speed_eps = 0.45;
    cfg.pca_components = 14;
    cfg.synth.trip_id = "roundtrip";
    cfg.synth.noise_sigma = 0.0625;
    cfg.synth.seed = cfg.seed;

    const auto back = mseg::parse_config(mseg::config_to_toml(cfg));
    CHECK(back.seed == cfg.seed);
    CHECK(back.ema.max_window_s == cfg.ema.max_window_s);
    CHECK(back.heuristics.stop_speed_eps == cfg.heuristics.stop_speed_eps);
    CHECK(back.pca_components == cfg.pca_components);
    CHECK(back.synth.trip_id == cfg.synth.trip_id);
    CHECK(back.synth.noise_sigma == cfg.synth.noise_sigma);
    // Canonical text of the reparsed config is byte-identical.
    CHECK(mseg::config_to_toml(back) == mseg::config_to_toml(cfg));
    CHECK(mseg::config_hash(back) == mseg::config_hash(cfg));
}

TEST_CASE("the config hash separates distinct configurations") {
    mseg::PipelineConfig a;
    mseg::PipelineConfig b;
    b.seed = 2;
    const auto hash_a = mseg::config_hash(a);
    CHECK(hash_a.size() == 16);
    CHECK(hash_a != mseg::config_hash(b));
    // Hashing is a pure function of the settings.
    CHECK(hash_a == mseg::config_hash(mseg::PipelineConfig{}));
}
