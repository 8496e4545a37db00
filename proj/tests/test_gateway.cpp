#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "xcs/gateway.hpp"

using namespace xcs;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("goal records parse and malformed lines are skipped with diagnostics") {
    std::string path = temp_path("xcs_goals_test.csv");
    {
        std::ofstream f(path);
        f << "T1,1.5,2.0\n";
        f << "\n";
        f << "# comment\n";
        f << "T2,abc,2.0\n";
        f << "T3,0.5,0.25\n";
    }
    std::vector<std::string> diags;
    auto goals = read_goals(path, &diags);
    REQUIRE(goals.size() == 2);
    REQUIRE(goals[0].task_id == "T1");
    REQUIRE(goals[0].x == 1.5);
    REQUIRE(goals[0].y == 2.0);
    REQUIRE(goals[1].task_id == "T3");
    REQUIRE(diags.size() == 1);
    REQUIRE(diags[0].find("T2") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("an unreadable goal source yields an empty set plus a diagnostic") {
    std::vector<std::string> diags;
    auto goals = read_goals(temp_path("xcs_no_such_file.csv"), &diags);
    REQUIRE(goals.empty());
    REQUIRE(diags.size() == 1);
}

TEST_CASE("an empty goal file yields an empty set") {
    std::string path = temp_path("xcs_goals_empty.csv");
    std::ofstream(path).close();
    std::vector<std::string> diags;
    REQUIRE(read_goals(path, &diags).empty());
    REQUIRE(diags.empty());
    std::filesystem::remove(path);
}

TEST_CASE("action records format exactly and round-trip") {
    ActionRecord go;
    go.robot = 3;
    go.cmd = ActionRecord::Cmd::Goto;
    go.x = 1.5;
    go.y = 2.0;
    go.task_id = "T1";
    REQUIRE(format_action(go) == "3,goto,1.5,2.0,T1\n");

    ActionRecord stop;
    stop.robot = 3;
    stop.cmd = ActionRecord::Cmd::Stop;
    stop.task_id = "T1";
    REQUIRE(format_action(stop) == "3,stop,,,T1\n");

    auto back = parse_action("3,goto,1.5,2.0,T1");
    REQUIRE(back);
    REQUIRE(back->robot == 3);
    REQUIRE(back->cmd == ActionRecord::Cmd::Goto);
    REQUIRE(back->x == 1.5);
    REQUIRE(back->y == 2.0);
    REQUIRE(back->task_id == "T1");

    auto back_stop = parse_action("3,stop,,,T1");
    REQUIRE(back_stop);
    REQUIRE(back_stop->cmd == ActionRecord::Cmd::Stop);
    REQUIRE(back_stop->task_id == "T1");
}

TEST_CASE("feedback parses the documented example") {
    auto fb = parse_feedback("3,1.0,2.0,0.5,navigating,ok,0.82");
    REQUIRE(fb);
    REQUIRE(fb->robot == 3);
    REQUIRE(fb->x == 1.0);
    REQUIRE(fb->y == 2.0);
    REQUIRE(fb->heading == 0.5);
    REQUIRE(fb->task == FeedbackRecord::TaskStatus::Navigating);
    REQUIRE(fb->system == FeedbackRecord::SystemStatus::Ok);
    REQUIRE(fb->battery == 0.82);
}

TEST_CASE("feedback tolerates trailing fields and carries fault reasons") {
    auto fb = parse_feedback("4,0.0,0.0,0.0,failed,fault:lifted,0.5,extra,fields");
    REQUIRE(fb);
    REQUIRE(fb->task == FeedbackRecord::TaskStatus::Failed);
    REQUIRE(fb->system == FeedbackRecord::SystemStatus::Fault);
    REQUIRE(fb->fault_reason == "lifted");
    REQUIRE(fault_reason_from_string(fb->fault_reason) == FailReason::Lifted);
}

TEST_CASE("feedback with battery outside [0,1] is rejected") {
    REQUIRE_FALSE(parse_feedback("3,0,0,0,none,ok,1.5"));
    REQUIRE_FALSE(parse_feedback("3,0,0,0,none,ok,-0.1"));
}

TEST_CASE("records round-trip for generated values") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(-50.0, 50.0);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        ActionRecord a;
        a.robot = static_cast<DeviceId>(rng() % 1000);
        a.cmd = rng() & 1 ? ActionRecord::Cmd::Goto : ActionRecord::Cmd::Stop;
        a.x = coord(rng);
        a.y = coord(rng);
        a.task_id = "T" + std::to_string(
            rng() % 100);
        std::string line = format_action(a);
        auto back = parse_action(line.substr(0, line.size() - 1));
        REQUIRE(back);
        REQUIRE(back->robot == a.robot);
        REQUIRE(back->cmd == a.cmd);
        if (a.cmd == ActionRecord::Cmd::Goto) {
            REQUIRE(back->x == a.x);
            REQUIRE(back->y == a.y);
        }
        REQUIRE(back->task_id == a.task_id);

        FeedbackRecord fb;
        fb.robot = static_cast<DeviceId>(rng() % 1000);
        fb.x = coord(rng);
        fb.y = coord(rng);
        fb.heading = coord(rng) / 10;
        fb.task = static_cast<FeedbackRecord::TaskStatus>(rng() % 4);
        fb.system = rng() & 1 ? FeedbackRecord::SystemStatus::Ok : FeedbackRecord::SystemStatus::Fault;
        if (fb.system == FeedbackRecord::SystemStatus::Fault) fb.fault_reason = "overheat";
        fb.battery = frac(rng);
        std::string fline = format_feedback(fb);
        auto fback = parse_feedback(fline.substr(0, fline.size() - 1));
        REQUIRE(fback);
        REQUIRE(fback->robot == fb.robot);
        REQUIRE(fback->x == fb.x);
        REQUIRE(fback->y == fb.y);
        REQUIRE(fback->heading == fb.heading);
        REQUIRE(fback->task == fb.task);
        REQUIRE(fback->system == fb.system);
        REQUIRE(fback->fault_reason == fb.fault_reason);
        REQUIRE(fback->battery == fb.battery);
    }
}

TEST_CASE("writes are atomic: a racing reader never sees a partial record") {
    std::string path = temp_path("xcs_action_race.csv");
    ActionRecord a;
    a.robot = 5;
    a.cmd = ActionRecord::Cmd::Goto;
    a.task_id = "T1";
    REQUIRE(write_action(path, a));

    std::atomic<bool> stop{false};
    std::atomic<int> bad{0};
    std::thread reader([&] {
        while (!stop) {
            std::ifstream in(path);
            std::string line;
            if (std::getline(in, line) && !line.empty()) {
                if (!parse_action(line)) bad += 1;
            }
        }
    });
    for (int i = 0; i < 500; ++i) {
        a.x = i * 0.5;
        a.y = i * 0.25;
        REQUIRE(write_action(path, a));
    }
    stop = true;
    reader.join();
    REQUIRE(bad == 0);
    std::filesystem::remove(path);
}
