#include "dpm/scenario_io.hpp"

#include "dpm/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <set>

namespace dpm {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigInvalid(msg); }

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) fail(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) fail(where + " has unknown key '" + key + "'");
    }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where + "." + key + " must be finite");
    return d;
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
    return obj.contains(key) ? get_number(obj, key, where) : fallback;
}

std::uint64_t get_count(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    fail(where + " must be a non-negative integer");
}

std::string get_string(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_string()) fail(where + "." + key + " must be a string");
    return v.get<std::string>();
}

TransitionCost parse_cost(const json& v, const std::string& where) {
    reject_unknown_keys(v, where, {"delay", "energy"});
    return {number_or(v, "delay", where, 0.0), number_or(v, "energy", where, 0.0)};
}

PsmConfig parse_psm(const json& j) {
    reject_unknown_keys(j, "psm", {"nominal_cycle_time", "nominal_cycle_energy", "states", "transitions"});
    PsmConfig psm = default_psm_config();
    auto edges = default_edge_costs();
    psm.nominal_cycle_time = number_or(j, "nominal_cycle_time", "psm", psm.nominal_cycle_time);
    psm.nominal_cycle_energy = number_or(j, "nominal_cycle_energy", "psm", psm.nominal_cycle_energy);
    if (j.contains("states")) {
        const auto& states = j.at("states");
        if (!states.is_object()) fail("psm.states must be an object");
        for (const auto& [name, body] : states.items()) {
            const auto s = parse_power_state(name);
            if (!s) fail("psm.states has unknown state '" + name + "'");
            const std::string where = "psm.states." + name;
            reject_unknown_keys(body, where, {"voltage_scale", "freq_scale", "idle_power", "entry", "exit"});
            auto& p = psm.at(*s);
            p.voltage_scale = number_or(body, "voltage_scale", where, p.voltage_scale);
            p.freq_scale = number_or(body, "freq_scale", where, p.freq_scale);
            p.idle_power = number_or(body, "idle_power", where, p.idle_power);
            if (body.contains("entry")) edges[index_of(*s)].entry = parse_cost(body.at("entry"), where + ".entry");
            if (body.contains("exit")) edges[index_of(*s)].exit = parse_cost(body.at("exit"), where + ".exit");
        }
    }
    fill_transitions(psm, edges);
    if (j.contains("transitions")) {
        const auto& list = j.at("transitions");
        if (!list.is_array()) fail("psm.transitions must be an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "psm.transitions[" + std::to_string(i) + "]";
            const auto& t = list[i];
            reject_unknown_keys(t, where, {"from", "to", "delay", "energy"});
            const auto from = parse_power_state(get_string(t, "from", where));
            const auto to = parse_power_state(get_string(t, "to", where));
            if (!from || !to) fail(where + " names an unknown state");
            psm.cost(*from, *to) = {number_or(t, "delay", where, 0.0), number_or(t, "energy", where, 0.0)};
        }
    }
    return psm;
}

TrafficGenerator parse_generator(const json& j, std::size_t index) {
    const std::string where = "generators[" + std::to_string(index) + "]";
    reject_unknown_keys(j, where, {"ip", "static_priority", "activity", "cycles", "idle", "priority_mix", "seed"});
    TrafficGenerator g;
    g.ip_id = get_string(j, "ip", where);
    if (g.ip_id.empty()) fail(where + ".ip must not be empty");
    if (j.contains("static_priority")) {
        const auto p = get_count(j.at("static_priority"), where + ".static_priority");
        if (p < 1 || p > 1'000'000) fail(where + ".static_priority must be >= 1");
        g.static_priority = static_cast<int>(p);
    }
    const std::string activity = j.contains("activity") ? get_string(j, "activity", where)
                                                         : (j.contains("idle") ? "custom" : "high");
    if (activity == "high") g.activity = Activity::High;
    else if (activity == "low") g.activity = Activity::Low;
    else if (activity == "custom") g.activity = Activity::Custom;
    else fail(where + ".activity must be high, low or custom");

    if (g.activity != Activity::Custom) {
        const auto b = activity_idle_bounds(g.activity);
        g.idle_min = b.min;
        g.idle_max = b.max;
    }
    if (j.contains("idle")) {
        const auto& v = j.at("idle");
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            fail(where + ".idle must be [min, max] seconds");
        g.idle_min = v[0].get<double>();
        g.idle_max = v[1].get<double>();
    } else if (g.activity == Activity::Custom) {
        fail(where + ".idle is required for custom activity");
    }
    if (j.contains("cycles")) {
        const auto& v = j.at("cycles");
        if (!v.is_array() || v.size() != 2) fail(where + ".cycles must be [min, max]");
        g.cycles_min = get_count(v[0], where + ".cycles[0]");
        g.cycles_max = get_count(v[1], where + ".cycles[1]");
    }
    if (j.contains("priority_mix")) {
        const auto& mix = j.at("priority_mix");
        reject_unknown_keys(mix, where + ".priority_mix", {"L", "M", "H", "V"});
        g.priority_mix = {0.0, 0.0, 0.0, 0.0};
        for (auto p : kAllPriorities) {
            g.priority_mix[static_cast<std::size_t>(p)] =
                number_or(mix, std::string(to_string(p)), where + ".priority_mix", 0.0);
        }
    }
    if (j.contains("seed")) g.seed = get_count(j.at("seed"), where + ".seed");
    return g;
}

RuleTable parse_rules(const json& list, const json* fallback) {
    if (!list.is_array()) fail("rules must be an array");
    RuleTable table;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "rules[" + std::to_string(i) + "]";
        const auto& row = list[i];
        try {
            reject_unknown_keys(row, where, {"priority", "battery", "temperature", "state"});
            for (const char* key : {"priority", "battery", "temperature", "state"}) {
                if (!row.contains(key)) fail(where + " is missing '" + key + "'");
            }
            table.rules.push_back(parse_rule({get_string(row, "priority", where), get_string(row, "battery", where),
                                              get_string(row, "temperature", where),
                                              get_string(row, "state", where)}));
        } catch (const ConfigInvalid& e) {
            const std::string msg = e.what();
            fail(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
        }
    }
    if (fallback) {
        if (!fallback->is_string()) fail("rule_fallback must be a state name");
        const auto s = parse_power_state(fallback->get<std::string>());
        if (!s || !(is_on(*s) || *s == PowerState::SL1)) fail("rule_fallback must be ON1..ON4 or SL1");
        table.fallback = *s;
    }
    return table;
}

}  // namespace

Scenario scenario_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        fail(std::string("scenario is not valid JSON: ") + e.what());
    }
    try {
        reject_unknown_keys(doc, "scenario",
                            {"name", "seed", "duration", "allow_off", "gem", "psm", "environment",
                             "thresholds", "rules", "rule_fallback", "lem", "generators"});
        Scenario s;
        s.name = doc.contains("name") ? get_string(doc, "name", "scenario") : "scenario";
        if (doc.contains("seed")) s.seed = get_count(doc.at("seed"), "seed");
        if (!doc.contains("duration")) fail("duration is required");
        s.duration = get_number(doc, "duration", "scenario");

        if (doc.contains("gem")) {
            const auto& g = doc.at("gem");
            reject_unknown_keys(g, "gem", {"present", "high_priority_threshold"});
            if (g.contains("present")) {
                if (!g.at("present").is_boolean()) fail("gem.present must be a boolean");
                s.gem.present = g.at("present").get<bool>();
            }
            if (g.contains("high_priority_threshold")) {
                s.gem.high_priority_threshold =
                    static_cast<int>(get_count(g.at("high_priority_threshold"), "gem.high_priority_threshold"));
            }
        }
        s.allow_off = !s.gem.present;
        if (doc.contains("allow_off")) {
            if (!doc.at("allow_off").is_boolean()) fail("allow_off must be a boolean");
            s.allow_off = doc.at("allow_off").get<bool>();
        }

        if (doc.contains("psm")) s.psm = parse_psm(doc.at("psm"));

        if (doc.contains("thresholds")) {
            const auto& t = doc.at("thresholds");
            reject_unknown_keys(t, "thresholds", {"battery", "temperature"});
            if (t.contains("battery")) {
                const auto& b = t.at("battery");
                if (!b.is_array() || b.size() != 4) fail("thresholds.battery must list 4 fractions");
                for (std::size_t i = 0; i < 4; ++i) {
                    if (!b[i].is_number()) fail("thresholds.battery must be numeric");
                    s.thresholds.battery_bounds[i] = b[i].get<double>();
                }
            }
            if (t.contains("temperature")) {
                const auto& b = t.at("temperature");
                if (!b.is_array() || b.size() != 2) fail("thresholds.temperature must list 2 bounds");
                for (std::size_t i = 0; i < 2; ++i) {
                    if (!b[i].is_number()) fail("thresholds.temperature must be numeric");
                    s.thresholds.temp_bounds[i] = b[i].get<double>();
                }
            }
        }

        if (doc.contains("environment")) {
            const auto& env = doc.at("environment");
            reject_unknown_keys(env, "environment", {"battery", "thermal"});
            if (env.contains("battery")) {
                const auto& b = env.at("battery");
                const std::string where = "environment.battery";
                reject_unknown_keys(b, where, {"capacity", "initial_class", "initial_fraction", "source"});
                auto& bat = s.environment.battery;
                bat.capacity = number_or(b, "capacity", where, bat.capacity);
                double fraction = 0.9;
                if (b.contains("initial_class") && b.contains("initial_fraction"))
                    fail(where + " takes initial_class or initial_fraction, not both");
                if (b.contains("initial_class")) {
                    const auto c = parse_battery_class(get_string(b, "initial_class", where));
                    if (!c || *c == BatteryClass::PowerSupply)
                        fail(where + ".initial_class must be Empty, Low, Medium, High or Full");
                    fraction = mid_band_fraction(*c, s.thresholds);
                }
                fraction = number_or(b, "initial_fraction", where, fraction);
                if (!(fraction >= 0.0 && fraction <= 1.0)) fail(where + ".initial_fraction must be in [0, 1]");
                bat.charge = fraction * bat.capacity;
                if (b.contains("source")) {
                    const auto src = get_string(b, "source", where);
                    if (src == "battery") bat.source = BatterySource::OnBattery;
                    else if (src == "supply") bat.source = BatterySource::PowerSupply;
                    else fail(where + ".source must be battery or supply");
                }
            }
            if (env.contains("thermal")) {
                const auto& t = env.at("thermal");
                const std::string where = "environment.thermal";
                reject_unknown_keys(t, where, {"ambient", "initial", "r_th", "c_th", "fan_factor"});
                auto& n = s.environment.thermal;
                n.ambient = number_or(t, "ambient", where, n.ambient);
                n.temperature = number_or(t, "initial", where, n.ambient);
                n.r_th = number_or(t, "r_th", where, n.r_th);
                n.c_th = number_or(t, "c_th", where, n.c_th);
                n.fan_factor = number_or(t, "fan_factor", where, n.fan_factor);
            }
        }

        if (doc.contains("rules")) {
            s.rules = parse_rules(doc.at("rules"), doc.contains("rule_fallback") ? &doc.at("rule_fallback") : nullptr);
        } else if (doc.contains("rule_fallback")) {
            s.rules = parse_rules(json::array(), &doc.at("rule_fallback"));
            s.rules.rules = default_rule_table().rules;
        }

        if (doc.contains("lem")) {
            const auto& l = doc.at("lem");
            reject_unknown_keys(l, "lem", {"idle_alpha", "estimate_noise"});
            s.lem.idle_alpha = number_or(l, "idle_alpha", "lem", s.lem.idle_alpha);
            s.lem.estimate_noise = number_or(l, "estimate_noise", "lem", s.lem.estimate_noise);
        }

        if (!doc.contains("generators") || !doc.at("generators").is_array())
            fail("generators must be an array");
        const auto& gens = doc.at("generators");
        for (std::size_t i = 0; i < gens.size(); ++i) s.generators.push_back(parse_generator(gens[i], i));

        validate_scenario(s);
        return s;
    } catch (const json::exception& e) {
        fail(std::string("malformed scenario: ") + e.what());
    }
}

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> problems;
    auto err = [&](std::string m) { problems.push_back(std::move(m)); };

    if (s.generators.empty()) err("scenario needs at least one generator");
    if (!(s.duration > 0.0) || !std::isfinite(s.duration)) err("duration must be > 0");

    std::set<std::string> ids;
    for (std::size_t i = 0; i < s.generators.size(); ++i) {
        const auto& g = s.generators[i];
        const std::string where = "generators[" + std::to_string(i) + "]";
        if (!ids.insert(g.ip_id).second) err(where + ".ip '" + g.ip_id + "' is duplicated");
        if (g.cycles_min == 0) err(where + ".cycles min must be > 0");
        if (g.cycles_min > g.cycles_max) err(where + ".cycles min exceeds max");
        if (!(g.idle_min >= 0.0) || !(g.idle_min <= g.idle_max) || !std::isfinite(g.idle_max))
            err(where + ".idle must satisfy 0 <= min <= max");
        double sum = 0.0;
        bool negative = false;
        for (double w : g.priority_mix) {
            sum += w;
            negative = negative || w < 0.0;
        }
        if (negative || std::abs(sum - 1.0) > 1e-9) err(where + ".priority_mix weights must be >= 0 and sum to 1");
        if (g.static_priority < 1) err(where + ".static_priority must be >= 1");
    }

    const auto psm = validate(s.psm);
    for (const auto& e : psm.errors) err(e);

    const auto& bb = s.thresholds.battery_bounds;
    for (std::size_t i = 0; i < bb.size(); ++i) {
        if (!(bb[i] > 0.0 && bb[i] < 1.0)) err("thresholds.battery values must be in (0, 1)");
        if (i > 0 && !(bb[i] > bb[i - 1])) err("thresholds.battery must be strictly ascending");
    }
    if (!(s.thresholds.temp_bounds[1] > s.thresholds.temp_bounds[0]))
        err("thresholds.temperature must be strictly ascending");

    const auto& bat = s.environment.battery;
    if (!(bat.capacity > 0.0)) err("environment.battery.capacity must be > 0");
    if (!(bat.charge >= 0.0 && bat.charge <= bat.capacity)) err("environment.battery charge out of range");

    const auto& n = s.environment.thermal;
    if (!(n.r_th > 0.0) || !(n.c_th > 0.0)) err("environment.thermal r_th and c_th must be > 0");
    if (!(n.fan_factor > 0.0 && n.fan_factor <= 1.0)) err("environment.thermal.fan_factor must be in (0, 1]");

    if (s.gem.high_priority_threshold < 0) err("gem.high_priority_threshold must be >= 0");
    if (!(s.lem.idle_alpha > 0.0 && s.lem.idle_alpha <= 1.0)) err("lem.idle_alpha must be in (0, 1]");
    if (!(s.lem.estimate_noise >= 0.0 && s.lem.estimate_noise < 1.0)) err("lem.estimate_noise must be in [0, 1)");

    for (std::size_t i = 0; i < s.rules.rules.size(); ++i) {
        const auto r = s.rules.rules[i].result;
        if (!is_on(r) && r != PowerState::SL1) err("rules[" + std::to_string(i) + "] result must be ON1..ON4 or SL1");
    }

    if (!problems.empty()) {
        std::string msg = problems.front();
        for (std::size_t i = 1; i < problems.size(); ++i) msg += "; " + problems[i];
        throw ConfigInvalid(msg);
    }

    std::vector<std::string> warnings = psm.warnings;
    for (auto i : shadowed_rules(s.rules)) {
        warnings.push_back("rules[" + std::to_string(i) + "] is shadowed by earlier rows and never fires");
    }
    return warnings;
}

std::string scenario_to_json(const Scenario& s) {
    json doc;
    doc["name"] = s.name;
    doc["seed"] = s.seed;
    doc["duration"] = s.duration;
    doc["allow_off"] = s.allow_off;
    doc["gem"] = {{"present", s.gem.present}, {"high_priority_threshold", s.gem.high_priority_threshold}};

    json states = json::object();
    for (auto st : kAllPowerStates) {
        const auto& p = s.psm.at(st);
        states[std::string(to_string(st))] = {
            {"voltage_scale", p.voltage_scale}, {"freq_scale", p.freq_scale}, {"idle_power", p.idle_power}};
    }
    json transitions = json::array();
    for (auto a : kAllPowerStates) {
        for (auto b : kAllPowerStates) {
            const auto& c = s.psm.cost(a, b);
            transitions.push_back({{"from", std::string(to_string(a))}, {"to", std::string(to_string(b))}, {"delay", c.delay}, {"energy", c.energy}});
        }
    }
    doc["psm"] = {{"nominal_cycle_time", s.psm.nominal_cycle_time},
                  {"nominal_cycle_energy", s.psm.nominal_cycle_energy},
                  {"states", states},
                  {"transitions", transitions}};

    const auto& bat = s.environment.battery;
    const auto& n = s.environment.thermal;
    doc["environment"] = {
        {"battery",
         {{"capacity", bat.capacity},
          {"initial_fraction", bat.charge / bat.capacity},
          {"source", bat.source == BatterySource::PowerSupply ? "supply" : "battery"}}},
        {"thermal",
         {{"ambient", n.ambient}, {"initial", n.temperature}, {"r_th", n.r_th}, {"c_th", n.c_th}, {"fan_factor", n.fan_factor}}}};
    doc["thresholds"] = {{"battery", s.thresholds.battery_bounds}, {"temperature", s.thresholds.temp_bounds}};

    json rules = json::array();
    for (const auto& r : s.rules.rules) {
        const auto t = format_rule(r);
        rules.push_back({{"priority", t.priority}, {"battery", t.battery}, {"temperature", t.temperature}, {"state", t.state}});
    }
    doc["rules"] = rules;
    doc["rule_fallback"] = std::string(to_string(s.rules.fallback));
    doc["lem"] = {{"idle_alpha", s.lem.idle_alpha}, {"estimate_noise", s.lem.estimate_noise}};

    json gens = json::array();
    for (const auto& g : s.generators) {
        json mix = json::object();
        for (auto p : kAllPriorities) mix[std::string(to_string(p))] = g.priority_mix[static_cast<std::size_t>(p)];
        gens.push_back({{"ip", g.ip_id},
                        {"static_priority", g.static_priority},
                        {"activity", std::string(to_string(g.activity))},
                        {"cycles", {g.cycles_min, g.cycles_max}},
                        {"idle", {g.idle_min, g.idle_max}},
                        {"priority_mix", mix},
                        {"seed", g.seed}});
    }
    doc["generators"] = gens;
    return doc.dump(2) + "\n";
}

}  // namespace dpm
