#include "dpm/environment.hpp"
#include "dpm/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace dpm;

TEST_CASE("drain") {
    Battery b{1000.0, 100.0, BatterySource::OnBattery};
    CHECK(drain(b, 30.0).charge == doctest::Approx(70.0));
    b.charge = 10.0;
    CHECK(drain(b, 30.0).charge == 0.0);
    Battery mains{1000.0, 400.0, BatterySource::PowerSupply};
    CHECK(drain(mains, 30.0).charge == 400.0);
    CHECK_THROWS_AS(drain(b, -1.0), NegativeEnergy);
}

TEST_CASE("battery classification") {
    const ClassThresholds t;
    Battery b{1000.0, 1000.0, BatterySource::OnBattery};
    CHECK(classify_battery(b, t) == BatteryClass::Full);
    b.charge = 0.0;
    CHECK(classify_battery(b, t) == BatteryClass::Empty);
    b.charge = 50.0;  // lower bound belongs to the upper band
    CHECK(classify_battery(b, t) == BatteryClass::Low);
    b.charge = 800.0;
    CHECK(classify_battery(b, t) == BatteryClass::Full);
    b.source = BatterySource::PowerSupply;
    CHECK(classify_battery(b, t) == BatteryClass::PowerSupply);
}

TEST_CASE("battery classification is monotone in charge") {
    const ClassThresholds t;
    Battery b{1000.0, 0.0, BatterySource::OnBattery};
    auto prev = classify_battery(b, t);
    for (int i = 1; i <= 10000; ++i) {
        b.charge = i * 0.1;
        const auto c = classify_battery(b, t);
        CHECK(static_cast<int>(c) >= static_cast<int>(prev));
        prev = c;
    }
}

TEST_CASE("mid band fractions classify into their own band") {
    const ClassThresholds t;
    for (auto c : {BatteryClass::Empty, BatteryClass::Low, BatteryClass::Medium, BatteryClass::High,
                   BatteryClass::Full}) {
        Battery b{1000.0, 1000.0 * mid_band_fraction(c, t), BatterySource::OnBattery};
        CHECK(classify_battery(b, t) == c);
    }
    CHECK(mid_band_fraction(BatteryClass::Full, t) == doctest::Approx(0.9));
}

TEST_CASE("one Euler step") {
    ThermalNode n{25.0, 25.0, 10.0, 50.0, false, 0.5};
    CHECK(step_temperature(n, 0.0, 1.0).temperature == 25.0);
    CHECK(step_temperature(n, 2.0, 1.0).temperature == doctest::Approx(25.04));
}

TEST_CASE("unstable steps are rejected") {
    ThermalNode n{25.0, 25.0, 10.0, 0.01, false, 0.5};
    CHECK(n.stability_bound() == doctest::Approx(0.05));
    CHECK_THROWS_AS(step_temperature(n, 1.0, 0.06), UnstableStep);
    CHECK_NOTHROW(step_temperature(n, 1.0, 0.05));
}

TEST_CASE("constant power converges to ambient + P R") {
    ThermalNode n{25.0, 25.0, 10.0, 0.01, false, 0.5};
    n = advance_temperature(n, 2.0, 10 * n.time_constant());
    CHECK(n.temperature == doctest::Approx(45.0).epsilon(0.01));
    n = advance_temperature(n, 2.0, 40 * n.time_constant());
    CHECK(n.temperature == doctest::Approx(45.0).epsilon(1e-9));
}

TEST_CASE("temperature never drops below ambient under non-negative power") {
    ThermalNode n{30.0, 25.0, 10.0, 0.01, false, 0.5};
    for (int i = 0; i < 1000; ++i) {
        n = step_temperature(n, (i % 7) * 0.1, 0.004);
        CHECK(n.temperature >= n.ambient);
    }
}

TEST_CASE("Euler error shrinks quadratically per step") {
    // Local error of one step vs two half steps, measured against dt^2.
    const ThermalNode n{80.0, 25.0, 10.0, 0.01, false, 0.5};
    double prev_ratio = 0.0;
    for (double dt : {0.02, 0.01, 0.005, 0.0025}) {
        const auto full = step_temperature(n, 1.5, dt);
        const auto half = step_temperature(step_temperature(n, 1.5, dt / 2), 1.5, dt / 2);
        const double ratio = std::abs(full.temperature - half.temperature) / (dt * dt);
        if (prev_ratio > 0.0) CHECK(ratio == doctest::Approx(prev_ratio).epsilon(1e-6));
        prev_ratio = ratio;
    }
}

TEST_CASE("temperature classification") {
    const ClassThresholds t;
    ThermalNode n;
    n.temperature = 59.9;
    CHECK(classify_temperature(n, t) == TempClass::Low);
    n.temperature = 60.0;
    CHECK(classify_temperature(n, t) == TempClass::Medium);
    n.temperature = 85.0;
    CHECK(classify_temperature(n, t) == TempClass::High);
    n.temperature = 120.0;
    CHECK(classify_temperature(n, t) == TempClass::High);
}

TEST_CASE("fan") {
    const ThermalNode n{25.0, 25.0, 10.0, 0.01, false, 0.5};
    SUBCASE("halves the steady excess") {
        const auto off = advance_temperature(n, 2.0, 5.0);
        const auto on = advance_temperature(set_fan(n, true), 2.0, 5.0);
        CHECK((on.temperature - 25.0) == doctest::Approx((off.temperature - 25.0) / 2).epsilon(1e-6));
    }
    SUBCASE("on then off restores the node") {
        const auto back = set_fan(set_fan(n, true), false);
        CHECK(back.fan_on == n.fan_on);
        CHECK(back.temperature == n.temperature);
        CHECK(back.r_th == n.r_th);
        CHECK(back.fan_factor == n.fan_factor);
    }
    SUBCASE("unit factor changes nothing") {
        ThermalNode unit = n;
        unit.fan_factor = 1.0;
        const auto a = advance_temperature(unit, 2.0, 0.3);
        const auto b = advance_temperature(set_fan(unit, true), 2.0, 0.3);
        CHECK(a.temperature == b.temperature);
    }
}
