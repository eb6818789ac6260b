#include "dpm/lem.hpp"

#include "dpm/errors.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace dpm {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

template <typename Parse>
ClassMask parse_mask(std::string_view field, std::string_view text, Parse parse_symbol) {
    const auto whole = trim(text);
    if (whole == "-") return ClassMask::any();
    if (whole.empty()) throw ConfigInvalid(std::string(field) + " is empty");
    auto mask = ClassMask::none();
    std::size_t start = 0;
    while (start <= whole.size()) {
        const auto comma = whole.find(',', start);
        const auto end = comma == std::string::npos ? whole.size() : comma;
        const auto token = trim(std::string_view(whole).substr(start, end - start));
        if (!parse_symbol(token, mask)) {
            throw ConfigInvalid(std::string(field) + " has unknown symbol '" + token + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return mask;
}

constexpr std::array<std::pair<std::string_view, BatteryClass>, 6> kBatterySymbols = {{
    {"E", BatteryClass::Empty},
    {"L", BatteryClass::Low},
    {"M", BatteryClass::Medium},
    {"H", BatteryClass::High},
    {"F", BatteryClass::Full},
    {"PS", BatteryClass::PowerSupply},
}};

constexpr std::array<std::string_view, 3> kTempSymbols = {"L", "M", "H"};

template <typename E, std::size_t N>
std::string format_mask(ClassMask mask, const std::array<E, N>& order,
                        std::string_view (*symbol)(E)) {
    if (mask.is_any()) return "-";
    std::string out;
    for (auto v : order) {
        if (!mask.contains(v)) continue;
        if (!out.empty()) out += ",";
        out += symbol(v);
    }
    return out;
}

std::string_view battery_symbol(BatteryClass c) {
    for (const auto& [sym, cls] : kBatterySymbols) {
        if (cls == c) return sym;
    }
    return "?";
}

std::string_view temp_symbol(TempClass c) { return kTempSymbols[static_cast<std::size_t>(c)]; }
std::string_view priority_symbol(PriorityClass p) { return to_string(p); }

bool matches(const Rule& r, PriorityClass p, BatteryClass b, TempClass t) noexcept {
    return r.priority.contains(p) && r.battery.contains(b) && r.temperature.contains(t);
}

}  // namespace

Rule parse_rule(const RuleText& text) {
    Rule r;
    r.priority = parse_mask("priority", text.priority, [](const std::string& tok, ClassMask& m) {
        auto p = parse_priority(tok);
        if (p) m.add(*p);
        return p.has_value();
    });
    r.battery = parse_mask("battery", text.battery, [](const std::string& tok, ClassMask& m) {
        for (const auto& [sym, cls] : kBatterySymbols) {
            if (sym == tok) {
                m.add(cls);
                return true;
            }
        }
        return false;
    });
    r.temperature = parse_mask("temperature", text.temperature, [](const std::string& tok, ClassMask& m) {
        for (std::size_t i = 0; i < kTempSymbols.size(); ++i) {
            if (kTempSymbols[i] == tok) {
                m.add(static_cast<TempClass>(i));
                return true;
            }
        }
        return false;
    });
    const auto state = parse_power_state(trim(text.state));
    if (!state) throw ConfigInvalid("state has unknown value '" + text.state + "'");
    if (!is_on(*state) && *state != PowerState::SL1)
        throw ConfigInvalid("state must be ON1..ON4 or SL1, got " + text.state);
    r.result = *state;
    return r;
}

RuleText format_rule(const Rule& rule) {
    return {format_mask(rule.priority, std::array{PriorityClass::V, PriorityClass::H,
                                                  PriorityClass::M, PriorityClass::L},
                        priority_symbol),
            format_mask(rule.battery, kAllBatteryClasses, battery_symbol),
            format_mask(rule.temperature, kAllTempClasses, temp_symbol),
            std::string(to_string(rule.result))};
}

RuleTable default_rule_table() {
    static const std::array<RuleText, 13> rows = {{
        {"V", "E", "-", "ON4"},
        {"V", "-", "H", "ON4"},
        {"H,M,L", "E", "-", "SL1"},
        {"H,M,L", "-", "H", "SL1"},
        {"-", "L", "M,L", "ON4"},
        {"-", "E", "M", "ON4"},  // dead under first-match, kept for fidelity
        {"V", "M,H", "L", "ON1"},
        {"H", "M,H", "L", "ON2"},
        {"M", "M,H", "L", "ON3"},
        {"L", "M,H", "L", "ON4"},
        {"V,H,M", "F", "L", "ON1"},
        {"L", "F", "L", "ON2"},
        {"-", "PS", "M,L", "ON1"},
    }};
    RuleTable table;
    table.fallback = PowerState::ON4;
    for (const auto& row : rows) table.rules.push_back(parse_rule(row));
    return table;
}

std::vector<std::size_t> shadowed_rules(const RuleTable& table) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < table.rules.size(); ++i) {
        bool reachable = false;
        for (auto p : kAllPriorities) {
            for (auto b : kAllBatteryClasses) {
                for (auto t : kAllTempClasses) {
                    if (!matches(table.rules[i], p, b, t)) continue;
                    const bool earlier = std::any_of(
                        table.rules.begin(), table.rules.begin() + static_cast<std::ptrdiff_t>(i),
                        [&](const Rule& r) { return matches(r, p, b, t); });
                    reachable = reachable || !earlier;
                }
            }
        }
        if (!reachable) out.push_back(i);
    }
    return out;
}

PowerState select_power_state(PriorityClass priority, BatteryClass battery, TempClass temperature,
                              const RuleTable& table) noexcept {
    for (const auto& r : table.rules) {
        if (matches(r, priority, battery, temperature)) return r.result;
    }
    return table.fallback;
}

Forecast forecast_end_of_task(const Task& task, PowerState candidate, const LemView& view) {
    const auto cost = instruction_cost(candidate, task.cycles, view.psm);
    const double consumed = cost.energy + view.others_energy;
    const auto battery = drain(view.battery, consumed);
    auto node = view.node;
    if (cost.duration > 0.0) node = advance_temperature(node, consumed / cost.duration, cost.duration);
    return {classify_battery(battery, view.thresholds), classify_temperature(node, view.thresholds)};
}

PowerState decide_task_state(const Task& task, bool gem_enable, const RuleTable& table,
                             const LemView& view) {
    if (!gem_enable) return PowerState::SL1;
    auto f = forecast_end_of_task(task, PowerState::ON1, view);
    auto state = select_power_state(task.priority, f.battery_class, f.temp_class, table);
    if (is_on(state) && state != PowerState::ON1) {
        f = forecast_end_of_task(task, state, view);
        state = select_power_state(task.priority, f.battery_class, f.temp_class, table);
    }
    return state;
}

double break_even_time(PowerState idle_state, PowerState sleep_state, const PsmConfig& config) {
    if (!is_on(idle_state) || !(is_sleep(sleep_state) || sleep_state == PowerState::Off)) {
        throw InvalidStates("break-even needs an ON idle state and a sleep/Off target, got " +
                            std::string(to_string(idle_state)) + " -> " +
                            std::string(to_string(sleep_state)));
    }
    const auto down = config.cost(idle_state, sleep_state);
    const auto up = config.cost(sleep_state, idle_state);
    const double t_tr = down.delay + up.delay;
    const double e_tr = down.energy + up.energy;
    const double p_idle = idle_power(idle_state, config);
    const double p_sleep = idle_power(sleep_state, config);
    if (p_idle <= p_sleep) return kInfiniteTime;
    return std::max(t_tr, (e_tr - p_sleep * t_tr) / (p_idle - p_sleep));
}

PowerState choose_idle_state(double predicted_idle, PowerState idle_state, const PsmConfig& config,
                             bool allow_off) {
    PowerState best = idle_state;
    double best_power = idle_power(idle_state, config);
    auto consider = [&](PowerState s) {
        if (break_even_time(idle_state, s, config) > predicted_idle) return;
        const double p = idle_power(s, config);
        if (p < best_power) {
            best = s;
            best_power = p;
        }
    };
    for (auto s : kSleepStates) consider(s);
    if (allow_off) consider(PowerState::Off);
    return best;
}

Prediction predict_idle(IdlePredictor predictor, double observed_idle) {
    if (observed_idle < 0.0) throw NegativeIdle("observed idle time is negative");
    if (!predictor.initialized) {
        predictor.predicted = observed_idle;
        predictor.initialized = true;
    } else {
        predictor.predicted =
            predictor.alpha * observed_idle + (1.0 - predictor.alpha) * predictor.predicted;
    }
    return {predictor, predictor.predicted};
}

double task_energy_estimate(const Task& task, PowerState state, const PsmConfig& config) {
    return instruction_cost(state, task.cycles, config).energy;
}

}  // namespace dpm
