// Scenario runner and live node launcher.
//
//   xcsim simulate <scenario> [--seed N] [--out DIR]
//   xcsim node --id N --port P --goals PATH --actions PATH --feedback PATH
//              [--theta N] [--omega PCT] [--preemptive] ...
//
// Exit codes: 0 success, 1 run failed its checks or timed out,
// 2 scenario error, 3 transport error, 4 gateway error.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "xcs/xcs.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

int run_simulate(const std::string& scenario, std::optional<std::uint64_t> seed,
                 const std::string& out_dir, bool quiet) {
    std::vector<std::string> errors;
    auto metrics = xcs::run_simulation(scenario, seed, out_dir, errors);
    if (!metrics) {
        for (const auto& e : errors) std::cerr << "error: " << e << "\n";
        return 2;
    }
    for (const auto& e : errors) std::cerr << "error: " << e << "\n";
    if (!quiet) {
        std::cout << "rounds=" << metrics->rounds << " messages=" << metrics->messages_sent
                  << " conflicts=" << metrics->conflicts_detected << "/"
                  << metrics->conflicts_resolved << " completed=" << (metrics->all_completed ? 1 : 0)
                  << " timed_out=" << (metrics->timed_out ? 1 : 0) << "\n";
        for (const auto& [id, t] : metrics->tasks) {
            std::printf("task %s first_assign=%.3f completed=%.3f reassignments=%d\n", id.c_str(),
                        t.first_assign, t.completed, t.reassignments);
        }
    }
    if (!metrics->violations.empty()) {
        for (const auto& v : metrics->violations) std::cerr << "violation: " << v << "\n";
        return 1;
    }
    return metrics->timed_out || !errors.empty() ? 1 : 0;
}

bool ensure_parent_dir(const std::string& path) {
    if (path.empty()) return false;
    std::filesystem::path p(path);
    auto dir = p.parent_path();
    if (dir.empty()) return true;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    return !ec || std::filesystem::exists(dir);
}

int run_node(xcs::NodeConfig cfg, xcs::UdpConfig net, bool verbose) {
    for (const auto& path : {cfg.goals_path, cfg.actions_path, cfg.feedback_path}) {
        if (!ensure_parent_dir(path)) {
            std::cerr << "error: cannot create directory for " << path << "\n";
            return 4;
        }
    }

    xcs::UdpTransport transport;
    if (!transport.start(cfg.id, net)) {
        std::cerr << "error: " << transport.last_error() << "\n";
        return 3;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    xcs::NodeRunner runner(cfg, transport);
    if (verbose)
        runner.logger = [](const std::string& msg) { std::cerr << "node: " << msg << "\n"; };
    std::cerr << "node " << cfg.id << " listening on port " << net.port << "\n";
    runner.run(g_stop);
    transport.stop();
    std::cerr << "node " << cfg.id << " stopped after " << runner.rounds() << " rounds\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exchange-calculus task assignment: simulator and live node"};
    app.require_subcommand(1);

    // simulate
    std::string scenario_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool have_seed = false;
    bool quiet = false;
    auto* sim = app.add_subcommand("simulate", "run a scenario file");
    sim->add_option("scenario", scenario_path, "scenario file")->required();
    sim->add_option("--seed", seed, "override the scenario seed");
    sim->add_flag("--quiet", quiet, "suppress the summary line");
    sim->add_option("--out", out_dir, "output directory (trace, metrics, timelines)");

    // node
    xcs::NodeConfig ncfg;
    xcs::UdpConfig net;
    bool preemptive = false;
    bool verbose = false;
    double x0 = 0, y0 = 0;
    auto* node = app.add_subcommand("node", "run a live node over the datagram transport");
    node->add_option("--id", ncfg.id, "unique device id")->required();
    node->add_option("--port", net.port, "UDP port");
    node->add_option("--goals", ncfg.goals_path, "goal file path")->required();
    node->add_option("--actions", ncfg.actions_path, "action file path")->required();
    node->add_option("--feedback", ncfg.feedback_path, "feedback file path")->required();
    node->add_option("--theta", ncfg.cfg.theta, "stable rounds before claiming");
    node->add_option("--omega", ncfg.cfg.omega, "preemption improvement, percent");
    node->add_flag("--preemptive", preemptive, "enable opportunistic reassignment");
    node->add_option("--period", ncfg.cfg.round_period, "round period, seconds");
    node->add_option("--retention", ncfg.cfg.retention, "message retention, seconds");
    node->add_option("--broadcast", net.broadcast_addr, "broadcast address");
    node->add_option("--bind", net.bind_addr, "bind address");
    node->add_option("--peer", net.peers, "unicast peer host:port (repeatable)");
    node->add_option("--x", x0, "initial x, meters");
    node->add_option("--y", y0, "initial y, meters");
    node->add_option("--battery", ncfg.initial_battery, "initial battery fraction");
    node->add_option("--rounds", ncfg.max_rounds, "stop after N rounds (default: run forever)");
    node->add_flag("--verbose", verbose, "log gateway and transport diagnostics");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) {
        have_seed = sim->count("--seed") > 0;
        return run_simulate(scenario_path,
                            have_seed ? std::optional<std::uint64_t>(seed) : std::nullopt, out_dir,
                            quiet);
    }
    ncfg.cfg.preemptive = preemptive;
    ncfg.initial_pos = {x0, y0};
    net.retention = ncfg.cfg.retention;
    return run_node(ncfg, net, verbose);
}
