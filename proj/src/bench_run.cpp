#include "wheelbench/bench.hpp"

#include "wheelbench/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <memory>
#include <mutex>
#include <thread>

#ifndef WHEELBENCH_VERSION
#define WHEELBENCH_VERSION "0.0.0"
#endif

namespace wheelbench::bench {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kOrderStream = 0x4f52444552000001ULL;

struct Job {
    std::size_t scenario = 0;
    std::size_t planner = 0;
    int repetition = 0;
    std::uint64_t seed = 0;
};

// State shared between a run's thread and the worker watching it. The run
// thread may outlive the worker when it is abandoned.
struct RunState {
    std::mutex mutex;
    std::condition_variable cv;
    std::atomic<bool> cancel{false};
    bool planned = false;
    bool done = false;
    Clock::time_point planned_at;
    RunRecord base;
    std::vector<RunRecord> records;
};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RunRecord base_record(const BenchmarkConfig& cfg, const env::Scenario& sc, const Job& job) {
    RunRecord r;
    r.scenario = sc.name;
    r.planner = cfg.planners[job.planner].label;
    r.steer = std::string(steer::to_string(cfg.steer));
    r.repetition = job.repetition;
    r.seed = job.seed;
    return r;
}

// Body of one run: plan, publish the plan record, then smooth.
void execute(const BenchmarkConfig& cfg, const env::Scenario& sc, const planners::PlannerFn& planner,
             const Job& job, RunState& state, Clock::time_point t0) {
    RunRecord rec = base_record(cfg, sc, job);
    std::optional<planners::PlanningProblem> problem;
    std::optional<steer::SteeredPath> path;
    try {
        problem.emplace(planners::PlanningProblem{
            sc,
            collision::ValidityChecker(sc.env, collision::CollisionModel::named(cfg.collision_model),
                                       cfg.check_resolution),
            steer::SteerFunction(cfg.steer, cfg.steer_config), cfg.goal_tolerance});
        planners::PlannerParams params = cfg.planners[job.planner].params;
        params.rng_seed = job.seed;
        const planners::PlanResult res = planner(*problem, params, planners::Budget(cfg.time_limit, &state.cancel));
        rec.status = res.status == planners::Status::Timeout ? RunStatus::Timeout : RunStatus::Ok;
        rec.planner_status = std::string(planners::to_string(res.status));
        rec.time_to_first = res.time_to_first_solution;
        rec.solution_history = res.solution_history;
        rec.metrics = metrics::evaluate(res, *problem);
        if (res.status == planners::Status::Solved) {
            path = res.path;
        }
    } catch (const std::exception& e) {
        rec.status = RunStatus::Error;
        rec.message = e.what();
    }
    rec.elapsed = seconds_since(t0);
    {
        std::lock_guard lock(state.mutex);
        state.base = rec;
        state.planned = true;
        state.planned_at = Clock::now();
    }
    state.cv.notify_all();

    std::vector<RunRecord> out;
    if (cfg.smoothers.empty()) {
        out.push_back(rec);
    }
    for (const SmootherEntry& s : cfg.smoothers) {
        RunRecord r = rec;
        r.smoother = s.name;
        if (path && rec.status != RunStatus::Error) {
            try {
                collision::ValidityChecker checker(problem->checker.env_ptr(), problem->checker.model(),
                                                   problem->checker.check_resolution());
                smoothing::SmootherParams sp = s.params;
                sp.rng_seed = job.seed;
                const smoothing::SmoothResult sm = smoothing::smooth(s.name, *path, checker, problem->steer, sp);
                r.metrics_smoothed = metrics::evaluate_path(sm.path, *problem);
                r.metrics_smoothed->planning_time = rec.metrics.planning_time;
                r.metrics_smoothed->state_checks = checker.state_checks();
                r.smoothing_time = sm.time;
            } catch (const std::exception& e) {
                r.status = RunStatus::Error;
                r.message = e.what();
            }
        }
        r.elapsed = seconds_since(t0);
        out.push_back(std::move(r));
    }
    {
        std::lock_guard lock(state.mutex);
        state.records = std::move(out);
        state.done = true;
    }
    state.cv.notify_all();
}

// Starts the run on its own thread and waits for it, abandoning the thread
// once the hard limit passes.
std::vector<RunRecord> supervise(const BenchmarkConfig& cfg, const env::Scenario& sc,
                                 const planners::PlannerFn& planner, const Job& job) {
    auto state = std::make_shared<RunState>();
    const Clock::time_point t0 = Clock::now();
    const auto hard = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(cfg.hard_kill_factor * cfg.time_limit));
    double smoothing_budget = 0.0;
    for (const SmootherEntry& s : cfg.smoothers) {
        smoothing_budget += s.params.time_budget;
    }
    // one second of grace covers record assembly after planning
    const auto smooth_hard = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(cfg.hard_kill_factor * smoothing_budget + 1.0));

    std::thread worker([cfg, sc, planner, job, state, t0] { execute(cfg, sc, planner, job, *state, t0); });

    std::unique_lock lock(state->mutex);
    const bool planned = state->cv.wait_until(lock, t0 + hard, [&] { return state->planned; });
    bool done = false;
    if (planned) {
        done = state->cv.wait_until(lock, state->planned_at + smooth_hard, [&] { return state->done; });
    }
    if (done) {
        std::vector<RunRecord> out = std::move(state->records);
        lock.unlock();
        worker.join();
        return out;
    }
    state->cancel = true;
    RunRecord killed = planned ? state->base : base_record(cfg, sc, job);
    lock.unlock();
    worker.detach();
    killed.status = RunStatus::Killed;
    killed.elapsed = seconds_since(t0);
    if (!planned) {
        killed.metrics.planning_time = killed.elapsed;
    }
    std::vector<RunRecord> out;
    if (cfg.smoothers.empty()) {
        out.push_back(killed);
    }
    for (const SmootherEntry& s : cfg.smoothers) {
        RunRecord r = killed;
        r.smoother = s.name;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::string tool_version() { return WHEELBENCH_VERSION; }

std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Ok:
            return "ok";
        case RunStatus::Timeout:
            return "timeout";
        case RunStatus::Killed:
            return "killed";
        case RunStatus::Error:
            return "error";
    }
    return "error";
}

RunStatus parse_run_status(std::string_view s) {
    for (RunStatus r : {RunStatus::Ok, RunStatus::Timeout, RunStatus::Killed, RunStatus::Error}) {
        if (to_string(r) == s) {
            return r;
        }
    }
    throw SchemaError("unknown run status: " + std::string(s));
}

bool canonical_less(const RunRecord& a, const RunRecord& b) {
    const auto key = [](const RunRecord& r) {
        return std::tie(r.scenario, r.planner, r.smoother, r.repetition);
    };
    return key(a) < key(b);
}

ResultSet run_experiment(const BenchmarkConfig& cfg) {
    cfg.validate();
    const std::vector<env::Scenario> scenarios = resolve_scenarios(cfg);
    std::vector<planners::PlannerFn> fns;
    for (const PlannerEntry& p : cfg.planners) {
        fns.push_back(planners::Registry::instance().get(p.name));
    }

    std::vector<Job> jobs;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        for (std::size_t p = 0; p < cfg.planners.size(); ++p) {
            for (int r = 0; r < cfg.repetitions; ++r) {
                jobs.push_back({s, p, r, run_seed(cfg.base_seed, jobs.size())});
            }
        }
    }

    ResultSet rs;
    rs.config = config_to_json(cfg);
    rs.tool_version = tool_version();
    rs.execution.workers = cfg.workers;
    rs.execution.order_seed = cfg.order_seed.value_or(mix64(cfg.base_seed ^ kOrderStream));
    rs.execution.started = utc_now();
    const Clock::time_point t0 = Clock::now();

    // Fisher-Yates shuffle of the execution order
    std::vector<std::size_t> order(jobs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    Rng rng(rs.execution.order_seed, kOrderStream);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }

    std::vector<std::vector<RunRecord>> slots(jobs.size());
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t k = next++; k < order.size(); k = next++) {
            const Job& job = jobs[order[k]];
            slots[order[k]] = supervise(cfg, scenarios[job.scenario], fns[job.planner], job);
        }
    };
    const int n_threads = std::min<int>(cfg.workers, static_cast<int>(std::max<std::size_t>(1, jobs.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) {
        pool.emplace_back(work);
    }
    for (std::thread& t : pool) {
        t.join();
    }

    for (std::vector<RunRecord>& slot : slots) {
        for (RunRecord& r : slot) {
            rs.runs.push_back(std::move(r));
        }
    }
    std::stable_sort(rs.runs.begin(), rs.runs.end(), canonical_less);
    rs.execution.elapsed = seconds_since(t0);
    rs.execution.finished = utc_now();
    return rs;
}

}  // namespace wheelbench::bench
