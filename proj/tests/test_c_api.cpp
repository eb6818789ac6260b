// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpm/dpm.h"

#include <cstring>
#include <string>

TEST_CASE("presets are listed and parse") {
    REQUIRE(dpm_preset_count() == 6);
    CHECK(std::string(dpm_preset_name(0)) == "A1");
    CHECK(dpm_preset_name(6) == nullptr);
    const char* doc = nullptr;
    REQUIRE(dpm_preset_document("B", &doc) == DPM_OK);
    CHECK(std::string(doc).find("\"B\"") != std::string::npos);
}

TEST_CASE("errors carry a status and a message") {
    dpm_scenario* s = nullptr;
    CHECK(dpm_scenario_from_preset("nope", &s) == DPM_ERR_UNKNOWN_SCENARIO);
    CHECK(s == nullptr);
    CHECK(std::strlen(dpm_last_error()) > 0);
    CHECK(dpm_scenario_from_json("{\"name\": 1}", &s) == DPM_ERR_CONFIG);
    CHECK(dpm_scenario_from_file("/nonexistent/x.json", &s) == DPM_ERR_IO);
    CHECK(dpm_scenario_from_preset(nullptr, &s) == DPM_ERR_ARGUMENT);
}

TEST_CASE("experiment through the handles") {
    dpm_scenario* s = nullptr;
    REQUIRE(dpm_scenario_from_preset("B", &s) == DPM_OK);
    CHECK(std::string(dpm_scenario_name(s)) == "B");
    dpm_scenario_set_seed(s, 3);
    CHECK(dpm_scenario_seed(s) == 3);
    REQUIRE(dpm_scenario_set_duration(s, 0.2) == DPM_OK);
    CHECK(dpm_scenario_set_duration(s, -1.0) == DPM_ERR_CONFIG);

    dpm_experiment* e = nullptr;
    REQUIRE(dpm_experiment_run(s, 1, &e) == DPM_OK);
    CHECK(dpm_experiment_ip_count(e) == 4);

    dpm_metrics m{};
    REQUIRE(dpm_experiment_metrics(e, &m) == DPM_OK);
    CHECK(m.energy_saving_pct > 0.0);

    dpm_totals dpm{}, base{};
    REQUIRE(dpm_experiment_totals(e, DPM_TRACE_DPM, &dpm) == DPM_OK);
    REQUIRE(dpm_experiment_totals(e, DPM_TRACE_BASELINE, &base) == DPM_OK);
    CHECK(dpm.tasks_arrived == base.tasks_arrived);
    CHECK(dpm.tasks_completed + dpm.tasks_pending == dpm.tasks_arrived);

    double sum = 0.0;
    for (size_t i = 0; i < 4; ++i) {
        double ej = -1.0;
        REQUIRE(dpm_experiment_ip_energy(e, DPM_TRACE_DPM, i, &ej) == DPM_OK);
        sum += ej;
    }
    CHECK(sum == doctest::Approx(dpm.total_energy_j));
    double dummy = 0.0;
    CHECK(dpm_experiment_ip_energy(e, DPM_TRACE_DPM, 4, &dummy) == DPM_ERR_ARGUMENT);
    CHECK(dpm_experiment_conservation_error(e, DPM_TRACE_DPM) <= 1e-9);

    char* csv = nullptr;
    REQUIRE(dpm_experiment_trace_csv(e, DPM_TRACE_DPM, &csv) == DPM_OK);
    CHECK(std::string(csv).rfind("time_s,ip,event,", 0) == 0);
    dpm_string_free(csv);

    char* report = nullptr;
    REQUIRE(dpm_experiment_report_json(e, "d.csv", nullptr, &report) == DPM_OK);
    CHECK(std::string(report).find("d.csv") != std::string::npos);
    dpm_string_free(report);

    char* expanded = nullptr;
    REQUIRE(dpm_scenario_to_json(s, &expanded) == DPM_OK);
    dpm_scenario* again = nullptr;
    CHECK(dpm_scenario_from_json(expanded, &again) == DPM_OK);
    dpm_string_free(expanded);
    dpm_scenario_free(again);

    dpm_experiment_free(e);
    dpm_scenario_free(s);
}

TEST_CASE("trace can be switched off") {
    dpm_scenario* s = nullptr;
    REQUIRE(dpm_scenario_from_preset("A1", &s) == DPM_OK);
    REQUIRE(dpm_scenario_set_duration(s, 0.05) == DPM_OK);
    dpm_experiment* e = nullptr;
    REQUIRE(dpm_experiment_run(s, 0, &e) == DPM_OK);
    char* csv = nullptr;
    REQUIRE(dpm_experiment_trace_csv(e, DPM_TRACE_BASELINE, &csv) == DPM_OK);
    CHECK(std::string(csv) == "time_s,ip,event,state,battery_J,temp_C,cum_energy_J\n");
    dpm_string_free(csv);
    dpm_experiment_free(e);
    dpm_scenario_free(s);
}
