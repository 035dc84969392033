// Command-line front end: train / eval / compare / oracle.
//
// Exit codes: 0 success, 1 configuration error, 2 contract violation,
// 3 infeasible oracle instance.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evmarl/evmarl.hpp"

namespace fs = std::filesystem;
using namespace evmarl;

namespace {

std::string hash12(const std::string& text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(text)));
    return std::string(buf).substr(0, 12);
}

std::string out_root(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("EVMARL_OUT"); env && *env) return env;
    return "runs";
}

fs::path make_run_dir(const std::string& root, const std::string& name, bool force) {
    fs::path dir = fs::path(root) / name;
    if (fs::exists(dir)) {
        if (!force)
            throw config_error("run directory already exists (use --force): " +
                               dir.string());
        fs::remove_all(dir);
    }
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot write " + path.string());
    f << text;
}

Csv train_log_csv(const std::vector<EpisodeLog>& log, Algo algo, std::uint64_t seed) {
    Csv csv({"episode", "algo", "seed", "mean_reward", "network_cost", "par",
             "satisfaction_rate", "noise_std"});
    for (const auto& e : log)
        csv.add_row({csv_num(e.episode), algo_name(algo), csv_num(seed),
                     csv_num(e.mean_reward), csv_num(e.network_cost), csv_num(e.par),
                     csv_num(e.satisfaction_rate), csv_num(e.noise_std)});
    return csv;
}

struct ArmResult {
    EvalReport report;
    std::vector<EpisodeEval> episodes;
};

// Train one arm into `dir` and evaluate it. The shared workhorse of cmd_train,
// cmd_compare and (minus training) cmd_eval.
ArmResult run_arm(const RunConfig& cfg, const fs::path& dir, bool quiet) {
    write_text(dir / "config.ini", effective_config(cfg));
    const int every = std::max(1, cfg.train.episodes / 10);
    auto progress = [&](const EpisodeLog& e) {
        if (!quiet && (e.episode + 1) % every == 0)
            std::fprintf(stderr, "  [%s seed %llu] episode %d/%d reward %.2f par %.3f\n",
                         algo_name(cfg.train.algo),
                         static_cast<unsigned long long>(cfg.train.seed), e.episode + 1,
                         cfg.train.episodes, e.mean_reward, e.par);
    };
    TrainResult tr = train(cfg.scenario, cfg.train, progress);
    train_log_csv(tr.log, cfg.train.algo, cfg.train.seed).write((dir / "train_log.csv").string());
    save_checkpoint(tr.learner, (dir / "checkpoint.txt").string());

    const std::uint64_t eval_seed =
        cfg.eval_seed != 0 ? cfg.eval_seed : derive_seed(cfg.train.seed, "eval");
    ArmResult arm;
    arm.report = evaluate(tr.learner, cfg.scenario, cfg.eval_episodes, eval_seed,
                          &arm.episodes);
    return arm;
}

void write_eval_outputs(const fs::path& dir, const RunConfig& cfg, const EvalReport& rep,
                        const std::vector<EpisodeEval>& episodes, std::uint64_t eval_seed) {
    Csv summary({"seed", "algo", "par_full_day", "par_charging_phase", "network_cost",
                 "mean_agent_cost", "satisfaction_rate"});
    summary.add_row({csv_num(eval_seed), algo_name(cfg.train.algo),
                     csv_num(rep.par_full_day), csv_num(rep.par_charging_phase),
                     csv_num(rep.total_network_cost), csv_num(rep.mean_agent_cost),
                     csv_num(rep.satisfaction_rate)});
    summary.write((dir / "eval_summary.csv").string());

    Csv hourly({"hour", "mean_demand_kw", "mean_price"});
    for (std::size_t h = 0; h < rep.mean_demand_by_hour.size(); ++h)
        hourly.add_row({csv_num(static_cast<int>(h)), csv_num(rep.mean_demand_by_hour[h]),
                        csv_num(rep.mean_price_by_hour[h])});
    hourly.write((dir / "hourly_profile.csv").string());

    Csv agents({"agent", "mean_cost"});
    for (std::size_t i = 0; i < rep.per_agent_cost.size(); ++i)
        agents.add_row({csv_num(static_cast<int>(i)), csv_num(rep.per_agent_cost[i])});
    agents.write((dir / "agent_costs.csv").string());

    Csv per_ep({"episode", "par_full_day", "par_charging_phase", "network_cost",
                "satisfaction_rate", "all_satisfied"});
    for (std::size_t e = 0; e < episodes.size(); ++e)
        per_ep.add_row({csv_num(static_cast<int>(e)), csv_num(episodes[e].par_full_day),
                        csv_num(episodes[e].par_charging_phase),
                        csv_num(episodes[e].network_cost),
                        csv_num(episodes[e].satisfaction_rate),
                        episodes[e].all_satisfied ? "1" : "0"});
    per_ep.write((dir / "eval_episodes.csv").string());
}

void print_report(const char* label, const EvalReport& rep) {
    std::printf("%s: par_full %.6g par_charging %.6g cost %.6g mean_agent_cost %.6g "
                "satisfaction %.6g\n",
                label, rep.par_full_day, rep.par_charging_phase, rep.total_network_cost,
                rep.mean_agent_cost, rep.satisfaction_rate);
}

int cmd_train(const std::string& config_path, const std::string& algo_flag,
              std::int64_t seed_flag, int agents_flag, int episodes_flag,
              const std::string& out_flag, bool force, bool quiet) {
    RunConfig cfg = parse_config(config_path);
    if (!algo_flag.empty()) cfg.train.algo = algo_from_name(algo_flag);
    if (seed_flag >= 0) cfg.train.seed = static_cast<std::uint64_t>(seed_flag);
    if (agents_flag >= 0) cfg.scenario.agents = static_cast<std::size_t>(agents_flag);
    if (episodes_flag >= 0) cfg.train.episodes = episodes_flag;
    cfg.scenario.validate();
    cfg.train.validate();
    const std::string eff = effective_config(cfg);
    const std::string name = "train-" + hash12(eff) + "-" +
                             std::string(algo_name(cfg.train.algo)) + "-s" +
                             std::to_string(cfg.train.seed);
    const fs::path dir = make_run_dir(out_root(out_flag), name, force);
    const ArmResult arm = run_arm(cfg, dir, quiet);
    const std::uint64_t eval_seed =
        cfg.eval_seed != 0 ? cfg.eval_seed : derive_seed(cfg.train.seed, "eval");
    write_eval_outputs(dir, cfg, arm.report, arm.episodes, eval_seed);
    std::printf("run_dir: %s\n", dir.string().c_str());
    print_report("final", arm.report);
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& config_path,
             int episodes_flag, std::int64_t seed_flag, const std::string& out_flag,
             bool force) {
    RunConfig cfg = parse_config(config_path);
    Learner learner = load_checkpoint(checkpoint_path);
    if (learner.n_agents() != cfg.scenario.agents)
        throw config_error("eval: checkpoint has " + std::to_string(learner.n_agents()) +
                           " agents, config expects " + std::to_string(cfg.scenario.agents));
    if (learner.obs_dim != kObsDim)
        throw config_error("eval: checkpoint observation dimension mismatch");
    cfg.train.algo = learner.algo;
    const int episodes = episodes_flag > 0 ? episodes_flag : cfg.eval_episodes;
    const std::uint64_t eval_seed =
        seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag)
                       : (cfg.eval_seed != 0 ? cfg.eval_seed
                                             : derive_seed(cfg.train.seed, "eval"));
    std::vector<EpisodeEval> per_episode;
    const EvalReport rep = evaluate(learner, cfg.scenario, episodes, eval_seed, &per_episode);

    const std::string name = "eval-" + hash12(effective_config(cfg)) + "-" +
                             std::string(algo_name(learner.algo)) + "-s" +
                             std::to_string(eval_seed);
    const fs::path dir = make_run_dir(out_root(out_flag), name, force);
    write_text(dir / "config.ini", effective_config(cfg));
    write_eval_outputs(dir, cfg, rep, per_episode, eval_seed);
    std::printf("run_dir: %s\n", dir.string().c_str());
    print_report("eval", rep);
    return 0;
}

int cmd_compare(const std::string& config_path, std::vector<std::uint64_t> seeds,
                int agents_flag, int episodes_flag, const std::string& out_flag,
                bool force, bool quiet) {
    if (seeds.empty()) throw config_error("compare: need at least one --seeds value");
    RunConfig base = parse_config(config_path);
    if (agents_flag >= 0) base.scenario.agents = static_cast<std::size_t>(agents_flag);
    if (episodes_flag >= 0) base.train.episodes = episodes_flag;
    base.scenario.validate();
    base.train.validate();

    std::string tag = effective_config(base);
    for (auto s : seeds) tag += "," + std::to_string(s);
    const fs::path dir = make_run_dir(out_root(out_flag), "compare-" + hash12(tag), force);
    write_text(dir / "config.ini", effective_config(base));

    Csv runs({"seed", "algo", "par_full_day", "par_charging_phase", "network_cost",
              "mean_agent_cost", "satisfaction_rate"});
    Csv deltas({"seed", "d_par_full_day", "d_par_charging_phase", "d_network_cost",
                "d_mean_agent_cost"});
    std::vector<EvalReport> by_algo[2];

    for (std::uint64_t seed : seeds) {
        EvalReport reports[2];
        for (Algo algo : {Algo::ctde, Algo::iddpg}) {
            RunConfig cfg = base;
            cfg.train.algo = algo;
            cfg.train.seed = seed;
            const fs::path arm_dir =
                dir / ("arm-" + std::string(algo_name(algo)) + "-s" + std::to_string(seed));
            fs::create_directories(arm_dir);
            const ArmResult arm = run_arm(cfg, arm_dir, quiet);
            const std::uint64_t eval_seed =
                cfg.eval_seed != 0 ? cfg.eval_seed : derive_seed(seed, "eval");
            write_eval_outputs(arm_dir, cfg, arm.report, arm.episodes, eval_seed);
            reports[algo == Algo::ctde ? 0 : 1] = arm.report;
            by_algo[algo == Algo::ctde ? 0 : 1].push_back(arm.report);
            runs.add_row({csv_num(seed), algo_name(algo), csv_num(arm.report.par_full_day),
                          csv_num(arm.report.par_charging_phase),
                          csv_num(arm.report.total_network_cost),
                          csv_num(arm.report.mean_agent_cost),
                          csv_num(arm.report.satisfaction_rate)});
        }
        deltas.add_row(
            {csv_num(seed),
             csv_num(reports[0].par_full_day - reports[1].par_full_day),
             csv_num(reports[0].par_charging_phase - reports[1].par_charging_phase),
             csv_num(reports[0].total_network_cost - reports[1].total_network_cost),
             csv_num(reports[0].mean_agent_cost - reports[1].mean_agent_cost)});
    }

    Csv summary({"algo", "par_full_day_mean", "par_full_day_std", "par_charging_phase_mean",
                 "par_charging_phase_std", "network_cost_mean", "network_cost_std",
                 "mean_agent_cost_mean", "mean_agent_cost_std", "satisfaction_mean",
                 "satisfaction_std"});
    for (int k = 0; k < 2; ++k) {
        auto field = [&](auto getter) {
            std::vector<double> xs;
            for (const auto& r : by_algo[k]) xs.push_back(getter(r));
            return summarize(xs);
        };
        const Summary pf = field([](const EvalReport& r) { return r.par_full_day; });
        const Summary pc = field([](const EvalReport& r) { return r.par_charging_phase; });
        const Summary nc = field([](const EvalReport& r) { return r.total_network_cost; });
        const Summary mc = field([](const EvalReport& r) { return r.mean_agent_cost; });
        const Summary st = field([](const EvalReport& r) { return r.satisfaction_rate; });
        summary.add_row({k == 0 ? "ctde" : "iddpg", csv_num(pf.mean), csv_num(pf.std),
                         csv_num(pc.mean), csv_num(pc.std), csv_num(nc.mean),
                         csv_num(nc.std), csv_num(mc.mean), csv_num(mc.std),
                         csv_num(st.mean), csv_num(st.std)});
    }
    runs.write((dir / "compare_runs.csv").string());
    deltas.write((dir / "compare_deltas.csv").string());
    summary.write((dir / "compare_summary.csv").string());

    std::printf("run_dir: %s\n", dir.string().c_str());
    std::printf("%s", summary.str().c_str());
    std::printf("%s", deltas.str().c_str());
    return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& checkpoint_path,
               const std::string& out_flag, bool force) {
    RunConfig cfg = parse_config(config_path);
    if (!cfg.has_oracle)
        throw config_error("oracle: config has no [oracle] section");
    const OracleInstance& inst = cfg.oracle;
    const OracleSolution sol = solve(inst);

    const fs::path dir =
        make_run_dir(out_root(out_flag), "oracle-" + hash12(effective_config(cfg)), force);
    write_text(dir / "config.ini", effective_config(cfg));

    const std::size_t n = inst.profiles.size();
    std::vector<std::string> cols{"hour"};
    for (std::size_t i = 0; i < n; ++i) cols.push_back("agent_" + std::to_string(i));
    cols.push_back("total");
    Csv schedule(cols);
    for (int h = 0; h < inst.horizon; ++h) {
        std::vector<std::string> row{csv_num(h)};
        for (std::size_t i = 0; i < n; ++i) row.push_back(csv_num(sol.schedule[i][h]));
        row.push_back(csv_num(sol.totals_by_hour[h]));
        schedule.add_row(row);
    }
    schedule.write((dir / "oracle_schedule.csv").string());

    std::printf("run_dir: %s\n", dir.string().c_str());
    std::printf("oracle: cost %.10g par %.10g feasible_schedules %llu of %llu\n", sol.cost,
                sol.par, static_cast<unsigned long long>(sol.feasible_count),
                static_cast<unsigned long long>(inst.enumeration_size()));

    Csv summary({"cost", "par", "feasible_schedules", "enumeration_size", "policy_cost",
                 "policy_cost_snapped", "policy_gap_pct", "policy_par_snapped",
                 "policy_feasible"});
    std::vector<std::string> row{csv_num(sol.cost), csv_num(sol.par),
                                 csv_num(sol.feasible_count),
                                 csv_num(inst.enumeration_size())};
    if (!checkpoint_path.empty()) {
        Learner learner = load_checkpoint(checkpoint_path);
        if (learner.n_agents() != n)
            throw config_error("oracle: checkpoint agent count does not match the instance");
        ScenarioConfig sc;
        sc.agents = n;
        sc.horizon = inst.horizon;
        sc.price = inst.price_model;
        sc.table.max_rate = inst.profiles[0].max_rate;
        sc.table.capacity = inst.profiles[0].capacity;
        sc.table.efficiency = inst.profiles[0].efficiency;
        const RolloutTrace trace = rollout(learner, sc, inst.profiles);

        std::vector<std::vector<double>> snapped(
            n, std::vector<double>(static_cast<std::size_t>(inst.horizon), 0.0));
        std::vector<std::vector<double>> raw = snapped;
        for (int h = 0; h < inst.horizon; ++h)
            for (std::size_t i = 0; i < n; ++i) {
                raw[i][h] = trace.actions_by_hour[h][i];
                snapped[i][h] = snap_to_grid(raw[i][h], inst.action_grid);
            }
        const auto [raw_cost, raw_par] = schedule_cost_par(raw, inst);
        const auto [snap_cost, snap_par] = schedule_cost_par(snapped, inst);
        const bool feasible = check_feasible(snapped, inst);
        const double gap_pct = (snap_cost - sol.cost) / sol.cost * 100.0;
        std::printf("policy: cost %.10g snapped %.10g gap %.4f%% par_snapped %.10g "
                    "feasible %d\n",
                    raw_cost, snap_cost, gap_pct, snap_par, feasible ? 1 : 0);
        row.insert(row.end(), {csv_num(raw_cost), csv_num(snap_cost), csv_num(gap_pct),
                               csv_num(snap_par), feasible ? "1" : "0"});
    } else {
        row.insert(row.end(), {"", "", "", "", ""});
    }
    summary.add_row(row);
    summary.write((dir / "oracle_summary.csv").string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized EV-charging control: CTDE-DDPG vs independent DDPG"};
    app.require_subcommand(1);

    std::string config_path, algo_flag, out_flag, checkpoint_path;
    std::int64_t seed_flag = -1;
    int episodes_flag = -1, agents_flag = -1;
    bool force = false, quiet = false;
    std::vector<std::uint64_t> seeds;

    auto* t = app.add_subcommand("train", "train one arm and evaluate it");
    t->add_option("--config", config_path, "config file")->required();
    t->add_option("--algo", algo_flag, "ctde or iddpg (overrides config)");
    t->add_option("--agents", agents_flag, "fleet size (overrides config)")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()));
    t->add_option("--episodes", episodes_flag, "training episodes (overrides config)")
        ->check(CLI::Range(0, std::numeric_limits<int>::max()));
    t->add_option("--seed", seed_flag, "run seed (overrides config)");
    t->add_option("--out", out_flag, "output root (default $EVMARL_OUT or ./runs)");
    t->add_flag("--force", force, "overwrite an existing run directory");
    t->add_flag("--quiet", quiet, "suppress progress output");

    auto* e = app.add_subcommand("eval", "evaluate a saved checkpoint");
    e->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    e->add_option("--config", config_path, "config file")->required();
    e->add_option("--episodes", episodes_flag, "evaluation episodes (overrides config)")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()));
    e->add_option("--seed", seed_flag, "evaluation seed (overrides config)");
    e->add_option("--out", out_flag, "output root");
    e->add_flag("--force", force, "overwrite an existing run directory");

    auto* c = app.add_subcommand("compare", "train both algos on matched seeds");
    c->add_option("--config", config_path, "config file")->required();
    c->add_option("--seeds", seeds, "run seeds")->required()->delimiter(',');
    c->add_option("--agents", agents_flag, "fleet size (overrides config)")
        ->check(CLI::Range(1, std::numeric_limits<int>::max()));
    c->add_option("--episodes", episodes_flag, "training episodes (overrides config)")
        ->check(CLI::Range(0, std::numeric_limits<int>::max()));
    c->add_option("--out", out_flag, "output root");
    c->add_flag("--force", force, "overwrite an existing run directory");
    c->add_flag("--quiet", quiet, "suppress progress output");

    auto* o = app.add_subcommand("oracle", "solve the frozen instance exhaustively");
    o->add_option("--config", config_path, "config file with an [oracle] section")->required();
    o->add_option("--checkpoint", checkpoint_path, "policy to compare against the optimum");
    o->add_option("--out", out_flag, "output root");
    o->add_flag("--force", force, "overwrite an existing run directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        // Usage mistakes land on the documented config-error code.
        return app.exit(ex) == 0 ? 0 : 1;
    }

    try {
        if (t->parsed())
            return cmd_train(config_path, algo_flag, seed_flag, agents_flag,
                             episodes_flag, out_flag, force, quiet);
        if (e->parsed())
            return cmd_eval(checkpoint_path, config_path, episodes_flag, seed_flag,
                            out_flag, force);
        if (c->parsed())
            return cmd_compare(config_path, seeds, agents_flag, episodes_flag, out_flag,
                               force, quiet);
        if (o->parsed()) return cmd_oracle(config_path, checkpoint_path, out_flag, force);
    } catch (const config_error& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    } catch (const infeasible_error& ex) {
        std::fprintf(stderr, "infeasible: %s\n", ex.what());
        return 3;
    } catch (const contract_error& ex) {
        std::fprintf(stderr, "contract violation: %s\n", ex.what());
        return 2;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    }
    return 0;
}
