#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evmarl/agent.hpp"
#include "evmarl/common.hpp"
#include "evmarl/env.hpp"
#include "evmarl/oracle.hpp"
#include "evmarl/trainer.hpp"

namespace evmarl {

namespace ini {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct Entry {
    std::string value;
    int line = 0;
    bool consumed = false;
};

// Strict INI: [section] headers, key = value lines, full-line comments with
// ';' or '#'. Unknown sections and keys are errors, duplicate keys too.
class IniFile {
  public:
    static IniFile parse(const std::string& text) {
        IniFile f;
        std::string section;
        int line_no = 0;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string t = trim(line);
            if (t.empty() || t[0] == ';' || t[0] == '#') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw config_error("config line " + std::to_string(line_no) +
                                       ": malformed section header");
                section = trim(t.substr(1, t.size() - 2));
                if (section.empty())
                    throw config_error("config line " + std::to_string(line_no) +
                                       ": empty section name");
                f.sections_[section];  // remember even if empty
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(line_no) +
                                   ": expected key = value");
            if (section.empty())
                throw config_error("config line " + std::to_string(line_no) +
                                   ": key outside any [section]");
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty())
                throw config_error("config line " + std::to_string(line_no) + ": empty key");
            auto& sec = f.sections_[section];
            if (sec.count(key))
                throw config_error("config line " + std::to_string(line_no) +
                                   ": duplicate key '" + key + "' in [" + section + "]");
            sec[key] = Entry{value, line_no, false};
        }
        return f;
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    bool has_section(const std::string& section) const {
        return sections_.count(section) > 0;
    }

    std::string take(const std::string& section, const std::string& key,
                     const std::string& fallback) {
        auto s = sections_.find(section);
        if (s == sections_.end()) return fallback;
        auto k = s->second.find(key);
        if (k == s->second.end()) return fallback;
        k->second.consumed = true;
        return k->second.value;
    }

    double take_double(const std::string& section, const std::string& key, double fallback) {
        const std::string v = take(section, key, "");
        if (v.empty()) return fallback;
        return parse_double(section, key, v);
    }

    int take_int(const std::string& section, const std::string& key, int fallback) {
        const std::string v = take(section, key, "");
        if (v.empty()) return fallback;
        try {
            std::size_t pos = 0;
            const long n = std::stol(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return static_cast<int>(n);
        } catch (const std::exception&) {
            throw bad_value(section, key, v, "an integer");
        }
    }

    std::uint64_t take_u64(const std::string& section, const std::string& key,
                           std::uint64_t fallback) {
        const std::string v = take(section, key, "");
        if (v.empty()) return fallback;
        try {
            std::size_t pos = 0;
            const auto n = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return n;
        } catch (const std::exception&) {
            throw bad_value(section, key, v, "an unsigned integer");
        }
    }

    bool take_bool(const std::string& section, const std::string& key, bool fallback) {
        const std::string v = take(section, key, "");
        if (v.empty()) return fallback;
        if (v == "true") return true;
        if (v == "false") return false;
        throw bad_value(section, key, v, "true or false");
    }

    std::vector<double> take_double_list(const std::string& section, const std::string& key,
                                         const std::vector<double>& fallback) {
        const std::string v = take(section, key, "");
        if (v.empty()) return fallback;
        std::vector<double> out;
        for (const std::string& item : split(v))
            out.push_back(parse_double(section, key, item));
        return out;
    }

    std::vector<int> take_int_list(const std::string& section, const std::string& key,
                                   const std::vector<int>& fallback) {
        const std::string v = take(section, key, "");
        if (v.empty()) return fallback;
        std::vector<int> out;
        for (const std::string& item : split(v)) {
            try {
                std::size_t pos = 0;
                out.push_back(static_cast<int>(std::stol(item, &pos)));
                if (pos != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw bad_value(section, key, v, "a comma-separated integer list");
            }
        }
        return out;
    }

    // Typo safety: every surviving key is one nobody asked for.
    void reject_unconsumed(const std::set<std::string>& known_sections) const {
        for (const auto& [section, keys] : sections_) {
            if (!known_sections.count(section))
                throw config_error("config: unknown section [" + section + "]");
            for (const auto& [key, entry] : keys)
                if (!entry.consumed)
                    throw config_error("config line " + std::to_string(entry.line) +
                                       ": unknown key '" + key + "' in [" + section + "]");
        }
    }

  private:
    static config_error bad_value(const std::string& section, const std::string& key,
                                  const std::string& v, const char* want) {
        return config_error("config: [" + section + "] " + key + ": '" + v +
                            "' is not " + want);
    }

    static double parse_double(const std::string& section, const std::string& key,
                               const std::string& v) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw bad_value(section, key, v, "a number");
        }
    }

    static std::vector<std::string> split(const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                out.push_back(trim(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        out.push_back(trim(cur));
        return out;
    }

    std::map<std::string, std::map<std::string, Entry>> sections_;
};

}  // namespace ini

struct RunConfig {
    ScenarioConfig scenario;
    TrainConfig train;
    int eval_episodes = 100;
    std::uint64_t eval_seed = 0;  // 0 = derived from the run seed
    bool has_oracle = false;
    OracleInstance oracle;
};

namespace detail {

inline void read_field_spec(ini::IniFile& f, const char* name, FieldSpec& spec) {
    const std::string base(name);
    spec.mean = f.take_double("behavior", base + "_mean", spec.mean);
    spec.std = f.take_double("behavior", base + "_std", spec.std);
    spec.lo = f.take_double("behavior", base + "_min", spec.lo);
    spec.hi = f.take_double("behavior", base + "_max", spec.hi);
}

inline PriceModel read_price(ini::IniFile& f, int horizon) {
    const double a = f.take_double("price", "a", 0.01);
    const double b = f.take_double("price", "b", 0.05);
    const double c = f.take_double("price", "c", 0.01);
    const double kappa = f.take_double("price", "kappa", 1.0);
    PriceModel m = PriceModel::uniform(static_cast<std::size_t>(horizon), a, b, c, kappa);
    for (int h = 0; h < horizon; ++h) {
        const std::string suffix = "_" + std::to_string(h);
        m.coefficients[h].a = f.take_double("price", "a" + suffix, m.coefficients[h].a);
        m.coefficients[h].b = f.take_double("price", "b" + suffix, m.coefficients[h].b);
        m.coefficients[h].c = f.take_double("price", "c" + suffix, m.coefficients[h].c);
    }
    return m;
}

inline OracleInstance read_oracle(ini::IniFile& f, const PriceModel& day_price) {
    OracleInstance inst;
    const int agents = f.take_int("oracle", "agents", 2);
    if (agents < 1) throw config_error("config: [oracle] agents must be >= 1");
    inst.horizon = f.take_int("oracle", "horizon", 3);
    inst.action_grid = f.take_double_list("oracle", "action_grid", {0.0, 5.0, 10.0});
    inst.feasibility_tol = f.take_double("oracle", "feasibility_tol", 0.5);
    inst.enumeration_cap =
        f.take_u64("oracle", "enumeration_cap", OracleInstance{}.enumeration_cap);

    EvProfile base;
    base.arrival_hour = f.take_int("oracle", "arrival", 0);
    base.departure_hour = f.take_int("oracle", "departure", inst.horizon);
    base.battery_at_arrival = f.take_double("oracle", "battery_at_arrival", 5.0);
    base.expected_battery = f.take_double("oracle", "expected_battery", 20.0);
    base.capacity = f.take_double("oracle", "capacity", 25.0);
    base.efficiency = f.take_double("oracle", "efficiency", 1.0);
    base.max_rate = f.take_double("oracle", "max_rate", 10.0);
    for (int i = 0; i < agents; ++i) {
        EvProfile p = base;
        const std::string sfx = "_" + std::to_string(i);
        p.arrival_hour = f.take_int("oracle", "arrival" + sfx, p.arrival_hour);
        p.departure_hour = f.take_int("oracle", "departure" + sfx, p.departure_hour);
        p.battery_at_arrival =
            f.take_double("oracle", "battery_at_arrival" + sfx, p.battery_at_arrival);
        p.expected_battery =
            f.take_double("oracle", "expected_battery" + sfx, p.expected_battery);
        inst.profiles.push_back(p);
    }

    // The oracle prices its own (short) horizon with the day's coefficients.
    inst.price_model.kappa = day_price.kappa;
    for (int h = 0; h < inst.horizon; ++h) {
        const std::size_t src = std::min(static_cast<std::size_t>(h), day_price.horizon() - 1);
        inst.price_model.coefficients.push_back(day_price.coefficients[src]);
    }
    return inst;
}

}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    ini::IniFile f = ini::IniFile::parse(text);
    RunConfig cfg;

    ScenarioConfig& sc = cfg.scenario;
    const int agents = f.take_int("scenario", "agents", 3);
    if (agents < 1) throw config_error("config: [scenario] agents must be >= 1");
    sc.agents = static_cast<std::size_t>(agents);
    sc.horizon = f.take_int("scenario", "horizon", 24);
    sc.seed = f.take_u64("scenario", "seed", 0);
    sc.fixed_behavior = f.take_bool("scenario", "fixed_behavior", false);
    sc.satisfaction_tol = f.take_double("scenario", "satisfaction_tol", 0.05);
    sc.par_charging_window = f.take_bool("scenario", "par_charging_window", false);
    sc.obs_price_ref_load = f.take_double("scenario", "obs_price_ref_load", 0.0);

    detail::read_field_spec(f, "arrival", sc.table.arrival);
    detail::read_field_spec(f, "departure", sc.table.departure);
    detail::read_field_spec(f, "expected_battery", sc.table.expected_battery);
    detail::read_field_spec(f, "battery_at_arrival", sc.table.battery_at_arrival);
    sc.table.capacity = f.take_double("behavior", "capacity", sc.table.capacity);
    sc.table.efficiency = f.take_double("behavior", "efficiency", sc.table.efficiency);
    sc.table.max_rate = f.take_double("behavior", "max_rate", sc.table.max_rate);

    sc.price = detail::read_price(f, sc.horizon);

    sc.reward.alpha1 = f.take_double("reward", "alpha1", 1.0);
    sc.reward.alpha2 = f.take_double("reward", "alpha2", 0.05);
    sc.reward.penalty_scale = f.take_double("reward", "penalty_scale", 10.0);

    TrainConfig& tr = cfg.train;
    tr.gamma = f.take_double("train", "gamma", tr.gamma);
    tr.tau = f.take_double("train", "tau", tr.tau);
    tr.batch_size = static_cast<std::size_t>(
        f.take_int("train", "batch_size", static_cast<int>(tr.batch_size)));
    tr.buffer_capacity = static_cast<std::size_t>(
        f.take_int("train", "buffer_capacity", static_cast<int>(tr.buffer_capacity)));
    tr.episodes = f.take_int("train", "episodes", tr.episodes);
    tr.noise_std_initial = f.take_double("train", "noise_std_initial", tr.noise_std_initial);
    tr.noise_std_final = f.take_double("train", "noise_std_final", tr.noise_std_final);
    tr.noise_decay_episodes =
        f.take_int("train", "noise_decay_episodes", tr.noise_decay_episodes);
    tr.updates_per_step = f.take_int("train", "updates_per_step", tr.updates_per_step);
    tr.seed = f.take_u64("train", "seed", tr.seed);
    tr.algo = algo_from_name(f.take("train", "algo", algo_name(tr.algo)));
    tr.nets.actor_hidden = f.take_int_list("train", "actor_hidden", tr.nets.actor_hidden);
    tr.nets.critic_hidden = f.take_int_list("train", "critic_hidden", tr.nets.critic_hidden);
    tr.nets.lr_actor = f.take_double("train", "lr_actor", tr.nets.lr_actor);
    tr.nets.lr_critic = f.take_double("train", "lr_critic", tr.nets.lr_critic);
    tr.nets.adam_beta1 = f.take_double("train", "adam_beta1", tr.nets.adam_beta1);
    tr.nets.adam_beta2 = f.take_double("train", "adam_beta2", tr.nets.adam_beta2);

    cfg.eval_episodes = f.take_int("eval", "episodes", 100);
    cfg.eval_seed = f.take_u64("eval", "seed", 0);
    if (cfg.eval_episodes < 1)
        throw config_error("config: [eval] episodes must be >= 1");

    cfg.has_oracle = f.has_section("oracle");
    if (cfg.has_oracle) {
        cfg.oracle = detail::read_oracle(f, sc.price);
        cfg.oracle.validate();
    }

    f.reject_unconsumed({"scenario", "behavior", "price", "reward", "train", "eval", "oracle"});
    sc.validate();
    tr.validate();
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

namespace detail {

inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// Re-emit the fully defaulted config. Feeding the result back through
// parse_config_text reproduces the same RunConfig, value for value.
inline std::string effective_config(const RunConfig& cfg) {
    using detail::fmt_full;
    std::ostringstream out;
    const ScenarioConfig& sc = cfg.scenario;
    out << "[scenario]\n";
    out << "agents = " << sc.agents << '\n';
    out << "horizon = " << sc.horizon << '\n';
    out << "seed = " << sc.seed << '\n';
    out << "fixed_behavior = " << (sc.fixed_behavior ? "true" : "false") << '\n';
    out << "satisfaction_tol = " << fmt_full(sc.satisfaction_tol) << '\n';
    out << "par_charging_window = " << (sc.par_charging_window ? "true" : "false") << '\n';
    out << "obs_price_ref_load = " << fmt_full(sc.obs_price_ref_load) << '\n';

    out << "\n[behavior]\n";
    auto spec = [&](const char* name, const FieldSpec& s) {
        out << name << "_mean = " << fmt_full(s.mean) << '\n';
        out << name << "_std = " << fmt_full(s.std) << '\n';
        out << name << "_min = " << fmt_full(s.lo) << '\n';
        out << name << "_max = " << fmt_full(s.hi) << '\n';
    };
    spec("arrival", sc.table.arrival);
    spec("departure", sc.table.departure);
    spec("expected_battery", sc.table.expected_battery);
    spec("battery_at_arrival", sc.table.battery_at_arrival);
    out << "capacity = " << fmt_full(sc.table.capacity) << '\n';
    out << "efficiency = " << fmt_full(sc.table.efficiency) << '\n';
    out << "max_rate = " << fmt_full(sc.table.max_rate) << '\n';

    out << "\n[price]\n";
    const HourCoeffs& base = sc.price.coefficients[0];
    out << "a = " << fmt_full(base.a) << '\n';
    out << "b = " << fmt_full(base.b) << '\n';
    out << "c = " << fmt_full(base.c) << '\n';
    out << "kappa = " << fmt_full(sc.price.kappa) << '\n';
    for (std::size_t h = 0; h < sc.price.horizon(); ++h) {
        const HourCoeffs& ch = sc.price.coefficients[h];
        if (ch.a != base.a) out << "a_" << h << " = " << fmt_full(ch.a) << '\n';
        if (ch.b != base.b) out << "b_" << h << " = " << fmt_full(ch.b) << '\n';
        if (ch.c != base.c) out << "c_" << h << " = " << fmt_full(ch.c) << '\n';
    }

    out << "\n[reward]\n";
    out << "alpha1 = " << fmt_full(sc.reward.alpha1) << '\n';
    out << "alpha2 = " << fmt_full(sc.reward.alpha2) << '\n';
    out << "penalty_scale = " << fmt_full(sc.reward.penalty_scale) << '\n';

    const TrainConfig& tr = cfg.train;
    out << "\n[train]\n";
    out << "algo = " << algo_name(tr.algo) << '\n';
    out << "seed = " << tr.seed << '\n';
    out << "episodes = " << tr.episodes << '\n';
    out << "gamma = " << fmt_full(tr.gamma) << '\n';
    out << "tau = " << fmt_full(tr.tau) << '\n';
    out << "batch_size = " << tr.batch_size << '\n';
    out << "buffer_capacity = " << tr.buffer_capacity << '\n';
    out << "noise_std_initial = " << fmt_full(tr.noise_std_initial) << '\n';
    out << "noise_std_final = " << fmt_full(tr.noise_std_final) << '\n';
    out << "noise_decay_episodes = " << tr.noise_decay_episodes << '\n';
    out << "updates_per_step = " << tr.updates_per_step << '\n';
    auto int_list = [&](const char* key, const std::vector<int>& xs) {
        out << key << " = ";
        for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
        out << '\n';
    };
    int_list("actor_hidden", tr.nets.actor_hidden);
    int_list("critic_hidden", tr.nets.critic_hidden);
    out << "lr_actor = " << fmt_full(tr.nets.lr_actor) << '\n';
    out << "lr_critic = " << fmt_full(tr.nets.lr_critic) << '\n';
    out << "adam_beta1 = " << fmt_full(tr.nets.adam_beta1) << '\n';
    out << "adam_beta2 = " << fmt_full(tr.nets.adam_beta2) << '\n';

    out << "\n[eval]\n";
    out << "episodes = " << cfg.eval_episodes << '\n';
    out << "seed = " << cfg.eval_seed << '\n';

    if (cfg.has_oracle) {
        const OracleInstance& oi = cfg.oracle;
        out << "\n[oracle]\n";
        out << "agents = " << oi.profiles.size() << '\n';
        out << "horizon = " << oi.horizon << '\n';
        out << "action_grid = ";
        for (std::size_t i = 0; i < oi.action_grid.size(); ++i)
            out << (i ? "," : "") << fmt_full(oi.action_grid[i]);
        out << '\n';
        out << "feasibility_tol = " << fmt_full(oi.feasibility_tol) << '\n';
        out << "enumeration_cap = " << oi.enumeration_cap << '\n';
        const EvProfile& b0 = oi.profiles[0];
        out << "capacity = " << fmt_full(b0.capacity) << '\n';
        out << "efficiency = " << fmt_full(b0.efficiency) << '\n';
        out << "max_rate = " << fmt_full(b0.max_rate) << '\n';
        for (std::size_t i = 0; i < oi.profiles.size(); ++i) {
            const EvProfile& p = oi.profiles[i];
            out << "arrival_" << i << " = " << p.arrival_hour << '\n';
            out << "departure_" << i << " = " << p.departure_hour << '\n';
            out << "battery_at_arrival_" << i << " = " << fmt_full(p.battery_at_arrival)
                << '\n';
            out << "expected_battery_" << i << " = " << fmt_full(p.expected_battery) << '\n';
        }
    }
    return out.str();
}

}  // namespace evmarl
