#include "wheelbench/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace wheelbench::bench {

namespace {

template <typename T>
json nullable(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
    const json& v = j.at(key);
    if (v.is_null()) {
        return std::nullopt;
    }
    return v.get<T>();
}

json pose_json(const geom::Pose& p) { return json::array({p.x(), p.y(), p.theta()}); }

geom::Pose pose_from(const json& j) {
    if (!j.is_array() || j.size() != 3) {
        throw SchemaError("pose must be [x, y, theta]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json record_to_json(const RunRecord& r) {
    json history = json::array();
    for (const auto& [t, len] : r.solution_history) {
        history.push_back(json::array({t, len}));
    }
    return {{"scenario", r.scenario},
            {"planner", r.planner},
            {"steer", r.steer},
            {"smoother", nullable(r.smoother)},
            {"repetition", r.repetition},
            {"seed", r.seed},
            {"status", std::string(to_string(r.status))},
            {"message", nullable(r.message)},
            {"planner_status", nullable(r.planner_status)},
            {"time_to_first", nullable(r.time_to_first)},
            {"elapsed", r.elapsed},
            {"metrics", metrics_to_json(r.metrics)},
            {"metrics_smoothed", r.metrics_smoothed ? metrics_to_json(*r.metrics_smoothed) : json(nullptr)},
            {"smoothing_time", nullable(r.smoothing_time)},
            {"solution_history", history}};
}

RunRecord record_from_json(const json& j) {
    RunRecord r;
    r.scenario = j.at("scenario").get<std::string>();
    r.planner = j.at("planner").get<std::string>();
    r.steer = j.at("steer").get<std::string>();
    r.smoother = optional_field<std::string>(j, "smoother");
    r.repetition = j.value("repetition", 0);
    r.seed = j.at("seed").get<std::uint64_t>();
    r.status = parse_run_status(j.at("status").get<std::string>());
    if (j.contains("message")) {
        r.message = optional_field<std::string>(j, "message");
    }
    if (j.contains("planner_status")) {
        r.planner_status = optional_field<std::string>(j, "planner_status");
    }
    r.time_to_first = optional_field<double>(j, "time_to_first");
    r.elapsed = j.value("elapsed", 0.0);
    r.metrics = metrics_from_json(j.at("metrics"));
    if (!j.at("metrics_smoothed").is_null()) {
        r.metrics_smoothed = metrics_from_json(j.at("metrics_smoothed"));
    }
    if (j.contains("smoothing_time")) {
        r.smoothing_time = optional_field<double>(j, "smoothing_time");
    }
    for (const json& h : j.at("solution_history")) {
        if (!h.is_array() || h.size() != 2) {
            throw SchemaError("solution_history entries must be [t, length]");
        }
        r.solution_history.emplace_back(h[0].get<double>(), h[1].get<double>());
    }
    return r;
}

std::optional<Stat> stat_of(const std::vector<double>& v) {
    if (v.empty()) {
        return std::nullopt;
    }
    Stat s;
    s.count = static_cast<int>(v.size());
    double sum = 0.0;
    for (const double x : v) {
        sum += x;
    }
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double sq = 0.0;
        for (const double x : v) {
            sq += (x - s.mean) * (x - s.mean);
        }
        s.stddev = std::sqrt(sq / static_cast<double>(v.size() - 1));
    }
    return s;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

json metrics_to_json(const metrics::MetricsRecord& m) {
    return {{"found", m.found},
            {"collision_free", m.collision_free},
            {"exact", m.exact},
            {"length", nullable(m.length)},
            {"mean_curvature", nullable(m.mean_curvature)},
            {"max_curvature", nullable(m.max_curvature)},
            {"cusps", nullable(m.cusps)},
            {"mean_clearance", nullable(m.mean_clearance)},
            {"planning_time", m.planning_time},
            {"state_checks", m.state_checks}};
}

metrics::MetricsRecord metrics_from_json(const json& j) {
    metrics::MetricsRecord m;
    m.found = j.at("found").get<bool>();
    m.collision_free = j.at("collision_free").get<bool>();
    m.exact = j.at("exact").get<bool>();
    m.length = optional_field<double>(j, "length");
    m.mean_curvature = optional_field<double>(j, "mean_curvature");
    m.max_curvature = optional_field<double>(j, "max_curvature");
    m.cusps = optional_field<int>(j, "cusps");
    m.mean_clearance = optional_field<double>(j, "mean_clearance");
    m.planning_time = j.value("planning_time", 0.0);
    m.state_checks = j.at("state_checks").get<std::uint64_t>();
    return m;
}

json to_json(const ResultSet& rs) {
    json runs = json::array();
    for (const RunRecord& r : rs.runs) {
        runs.push_back(record_to_json(r));
    }
    return {{"schema_version", kSchemaVersion},
            {"tool_version", rs.tool_version},
            {"config", rs.config},
            {"execution",
             {{"workers", rs.execution.workers},
              {"order_seed", rs.execution.order_seed},
              {"started", rs.execution.started},
              {"finished", rs.execution.finished},
              {"elapsed", rs.execution.elapsed}}},
            {"runs", runs}};
}

ResultSet from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("schema_version")) {
        throw SchemaError("missing schema_version");
    }
    if (!doc.at("schema_version").is_number_integer()) {
        throw SchemaError("schema_version must be an integer");
    }
    const int version = doc.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
        throw SchemaError("unsupported schema_version " + std::to_string(version) + " (expected " +
                          std::to_string(kSchemaVersion) + ")");
    }
    ResultSet rs;
    try {
        if (!doc.contains("runs")) {
            throw SchemaError("missing runs");
        }
        rs.config = doc.value("config", json::object());
        rs.tool_version = doc.value("tool_version", "");
        if (doc.contains("execution")) {
            const json& e = doc.at("execution");
            rs.execution.workers = e.value("workers", 1);
            rs.execution.order_seed = e.value("order_seed", std::uint64_t{0});
            rs.execution.started = e.value("started", "");
            rs.execution.finished = e.value("finished", "");
            rs.execution.elapsed = e.value("elapsed", 0.0);
        }
        for (const json& r : doc.at("runs")) {
            rs.runs.push_back(record_from_json(r));
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("result schema violation: ") + e.what());
    }
    return rs;
}

void write_results(const ResultSet& rs, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << to_json(rs).dump(2) << '\n';
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

ResultSet read_results(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": malformed JSON: " + e.what());
    }
    return from_json(doc);
}

json strip_wall_clock(json doc) {
    doc.erase("execution");
    if (!doc.contains("runs")) {
        return doc;
    }
    for (json& r : doc["runs"]) {
        r.erase("time_to_first");
        r.erase("elapsed");
        r.erase("smoothing_time");
        for (const char* key : {"metrics", "metrics_smoothed"}) {
            if (r.contains(key) && r[key].is_object()) {
                r[key].erase("planning_time");
            }
        }
        if (r.contains("solution_history")) {
            for (json& h : r["solution_history"]) {
                h[0] = nullptr;
            }
        }
    }
    return doc;
}

std::string SummaryRow::solutions() const {
    if (found == 0) {
        return "0";
    }
    return std::to_string(valid) + " / " + std::to_string(found);
}

std::vector<SummaryRow> aggregate(const ResultSet& rs) {
    using Key = std::tuple<std::string, std::string, std::optional<std::string>>;
    struct Acc {
        SummaryRow row;
        std::vector<double> time, length, max_k, mean_k, clearance;
    };
    std::map<Key, Acc> groups;
    for (const RunRecord& r : rs.runs) {
        Acc& g = groups[Key{r.planner, r.steer, r.smoother}];
        g.row.planner = r.planner;
        g.row.steer = r.steer;
        g.row.smoother = r.smoother;
        ++g.row.runs;
        const metrics::MetricsRecord& m = r.smoother && r.metrics_smoothed ? *r.metrics_smoothed : r.metrics;
        g.time.push_back(r.metrics.planning_time);
        if (!m.found) {
            continue;
        }
        ++g.row.found;
        g.row.valid += m.collision_free && m.exact;
        if (m.length) g.length.push_back(*m.length);
        if (m.max_curvature) g.max_k.push_back(*m.max_curvature);
        if (m.mean_curvature) g.mean_k.push_back(*m.mean_curvature);
        if (m.mean_clearance) g.clearance.push_back(*m.mean_clearance);
        if (m.cusps) g.row.cusps = g.row.cusps.value_or(0) + *m.cusps;
    }
    std::vector<SummaryRow> out;
    for (auto& [key, g] : groups) {
        g.row.time = stat_of(g.time);
        g.row.length = stat_of(g.length);
        g.row.max_curvature = stat_of(g.max_k);
        g.row.mean_curvature = stat_of(g.mean_k);
        g.row.mean_clearance = stat_of(g.clearance);
        out.push_back(std::move(g.row));
    }
    return out;
}

std::string format_csv(const std::vector<SummaryRow>& rows) {
    std::string out =
        "planner,steer,smoother,runs,found,valid,solutions,time_mean,time_std,length_mean,length_std,"
        "max_curvature_mean,max_curvature_std,mean_curvature_mean,mean_curvature_std,clearance_mean,"
        "clearance_std,cusps\n";
    const auto stat = [](const std::optional<Stat>& s) {
        return s ? fixed(s->mean, 6) + "," + fixed(s->stddev, 6) : std::string("N/A,N/A");
    };
    for (const SummaryRow& r : rows) {
        out += r.planner + "," + r.steer + "," + r.smoother.value_or("") + "," + std::to_string(r.runs) + "," +
               std::to_string(r.found) + "," + std::to_string(r.valid) + "," + r.solutions() + "," + stat(r.time) +
               "," + stat(r.length) + "," + stat(r.max_curvature) + "," + stat(r.mean_curvature) + "," +
               stat(r.mean_clearance) + "," + (r.cusps ? std::to_string(*r.cusps) : "N/A") + "\n";
    }
    return out;
}

std::string format_markdown(const std::vector<SummaryRow>& rows) {
    std::string out =
        "| Planner | Steer | Smoother | Solutions | Time [s] | Path Length [m] | Max Curvature [1/m] | "
        "Mean Curvature [1/m] | Clearance [m] | Cusps |\n"
        "|---|---|---|---|---|---|---|---|---|---|\n";
    const auto stat = [](const std::optional<Stat>& s) {
        return s ? fixed(s->mean, 3) + " ± " + fixed(s->stddev, 3) : std::string("N/A");
    };
    for (const SummaryRow& r : rows) {
        out += "| " + r.planner + " | " + r.steer + " | " + r.smoother.value_or("-") + " | " + r.solutions() +
               " | " + stat(r.time) + " | " + stat(r.length) + " | " + stat(r.max_curvature) + " | " +
               stat(r.mean_curvature) + " | " + stat(r.mean_clearance) + " | " +
               (r.cusps ? std::to_string(*r.cusps) : "N/A") + " |\n";
    }
    return out;
}

json path_to_json(const steer::SteeredPath& path, double resolution) {
    json segments = json::array();
    for (const steer::SegmentDescriptor& seg : path.segments()) {
        json s = {{"kind", std::string(steer::to_string(seg.kind))},
                  {"signed_length", seg.signed_length},
                  {"curvature", seg.curvature}};
        if (seg.kind == steer::SegmentKind::Integrated) {
            json trace = json::array();
            for (const steer::TracePoint& t : seg.trace) {
                trace.push_back(json::array({t.pose.x(), t.pose.y(), t.pose.theta(), t.curvature}));
            }
            s["trace"] = std::move(trace);
        }
        segments.push_back(std::move(s));
    }
    json samples = json::array();
    for (const steer::PathSample& p : steer::sample_path(path, resolution)) {
        samples.push_back(json::array({p.pose.x(), p.pose.y(), p.pose.theta(), p.arc_length, p.direction, p.curvature}));
    }
    return {{"start", pose_json(path.start())},
            {"end", pose_json(path.end())},
            {"length", path.length()},
            {"resolution", resolution},
            {"segments", segments},
            {"samples", samples}};
}

steer::SteeredPath path_from_json(const json& doc) {
    try {
        const geom::Pose start = pose_from(doc.at("start"));
        std::vector<steer::SegmentDescriptor> segs;
        for (const json& s : doc.at("segments")) {
            const steer::SegmentKind kind = steer::parse_segment_kind(s.at("kind").get<std::string>());
            const double len = s.at("signed_length").get<double>();
            switch (kind) {
                case steer::SegmentKind::Straight:
                    segs.push_back(steer::SegmentDescriptor::straight(len));
                    break;
                case steer::SegmentKind::LeftArc:
                case steer::SegmentKind::RightArc:
                    segs.push_back(steer::SegmentDescriptor::arc(len, s.at("curvature").get<double>()));
                    break;
                case steer::SegmentKind::Integrated: {
                    std::vector<steer::TracePoint> trace;
                    for (const json& t : s.at("trace")) {
                        if (!t.is_array() || t.size() != 4) {
                            throw SchemaError("trace points must be [x, y, theta, curvature]");
                        }
                        trace.push_back({geom::Pose(t[0].get<double>(), t[1].get<double>(), t[2].get<double>()),
                                         t[3].get<double>()});
                    }
                    segs.push_back(steer::SegmentDescriptor::integrated(std::move(trace), len < 0.0 ? -1 : 1));
                    break;
                }
            }
        }
        steer::SteeredPath path(start, std::move(segs));
        if (doc.contains("end")) {
            path.snap_end(pose_from(doc.at("end")));
        }
        return path;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("path schema violation: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("path: ") + e.what());
    } catch (const std::logic_error& e) {
        throw SchemaError(std::string("path: ") + e.what());
    }
}

}  // namespace wheelbench::bench
