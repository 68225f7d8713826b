#include "adaptix/datalog.hpp"

#include <cmath>
#include <set>
#include <string>

#include "adaptix/errors.hpp"
#include "adaptix/metrics.hpp"

namespace adaptix {

using nlohmann::json;

json record_to_json(const EventLogRecord& r) {
    return {{"user_id", r.user_id},
            {"session_id", r.session_id},
            {"step", r.step},
            {"layout", serialize_layout(pack(r.layout, r.grid), r.layout)},
            {"clicks", r.clicks},
            {"dwell_norm", r.dwell_norm},
            {"retained", r.retained},
            {"reward", r.reward}};
}

namespace {

template <class T>
T field(const json& j, const char* name, std::size_t line) {
    if (!j.contains(name)) throw ParseError(name, "missing field", line);
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw ParseError(name, "wrong type", line);
    }
}

}  // namespace

EventLogRecord record_from_json(const json& j, std::size_t line) {
    if (!j.is_object()) throw ParseError("", "expected a JSON object", line);
    EventLogRecord r;
    r.user_id = field<std::int64_t>(j, "user_id", line);
    r.session_id = field<std::int64_t>(j, "session_id", line);
    r.step = field<int>(j, "step", line);
    if (!j.contains("layout")) throw ParseError("layout", "missing field", line);
    try {
        const auto& doc = j.at("layout");
        r.layout = deserialize_layout(doc);
        r.grid.cols = doc.at("grid_cols").get<int>();
        r.grid.fold_row = doc.at("fold_row").get<int>();
    } catch (const ValidationError& e) {
        throw ValidationError("layout." + e.field(), e.what(), line);
    } catch (const ParseError& e) {
        throw ParseError("layout." + e.field(), e.what(), line);
    } catch (const json::exception& e) {
        throw ParseError("layout", e.what(), line);
    }
    r.clicks = field<std::vector<int>>(j, "clicks", line);
    r.dwell_norm = field<double>(j, "dwell_norm", line);
    r.retained = field<bool>(j, "retained", line);
    r.reward = field<double>(j, "reward", line);

    if (r.step < 0) throw ValidationError("step", "must be >= 0", line);
    if (!(r.dwell_norm >= 0.0 && r.dwell_norm <= 1.0)) throw ValidationError("dwell_norm", "must lie in [0,1]", line);
    if (!std::isfinite(r.reward)) throw ValidationError("reward", "must be finite", line);
    std::set<int> seen;
    for (std::size_t i = 0; i < r.clicks.size(); ++i) {
        const std::string path = "clicks[" + std::to_string(i) + "]";
        if (r.layout.position_of(r.clicks[i]) < 0) throw ValidationError(path, "id not in layout", line);
        if (!seen.insert(r.clicks[i]).second) throw ValidationError(path, "duplicate id", line);
    }
    return r;
}

EventLogRecord make_record(const SessionRecord& s, std::int64_t user_id, std::int64_t session_id,
                           const GridConfig& grid) {
    EventLogRecord r;
    r.user_id = user_id;
    r.session_id = session_id;
    r.step = s.step;
    r.layout = s.shown;
    r.grid = grid;
    for (std::size_t i = 0; i < s.outcome.clicks.size(); ++i)
        if (s.outcome.clicks[i]) r.clicks.push_back(s.shown.components[i].id);
    r.dwell_norm = s.outcome.dwell_norm;
    r.retained = s.outcome.retained;
    r.reward = s.reward;
    return r;
}

EventLogWriter::EventLogWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    out_ << json{{"schema", kEventSchema}, {"version", kEventSchemaVersion}}.dump() << '\n';
}

void EventLogWriter::write(const EventLogRecord& r) {
    out_ << record_to_json(r).dump() << '\n';
    if (!out_) throw IoError("failed writing " + path_.string());
    ++written_;
}

void EventLogWriter::close() {
    out_.flush();
    if (!out_) throw IoError("failed writing " + path_.string());
    out_.close();
}

void write_records(const std::filesystem::path& path, const std::vector<EventLogRecord>& records) {
    EventLogWriter w(path);
    for (const auto& r : records) w.write(r);
    w.close();
}

std::vector<EventLogRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<EventLogRecord> out;
    std::set<std::pair<std::int64_t, std::int64_t>> keys;
    std::string text;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, text)) {
        ++line_no;
        if (text.empty()) throw ParseError("", "empty line", line_no);
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError("", e.what(), line_no);
        }
        if (!header) {
            if (!j.is_object() || j.value("schema", "") != kEventSchema)
                throw ParseError("schema", "missing adaptix-events header", line_no);
            if (j.value("version", 0) != kEventSchemaVersion)
                throw ValidationError("version", "unsupported schema version", line_no);
            header = true;
            continue;
        }
        auto r = record_from_json(j, line_no);
        if (!keys.insert({r.user_id, r.session_id}).second)
            throw ValidationError("session_id", "duplicate (user_id, session_id)", line_no);
        out.push_back(std::move(r));
    }
    if (!header) throw ParseError("schema", "missing adaptix-events header", 1);
    return out;
}

void SessionLogger::operator()(Phase phase, const SessionRecord& s) {
    const std::int64_t user = static_cast<std::int64_t>(s.user) + (phase == Phase::eval ? eval_offset_ : 0);
    const std::int64_t session = next_session_[user]++;
    writer_.write(make_record(s, user, session, grid_));
}

std::vector<EventLogRecord> generate_dataset(int n_users, int sessions_per_user, DatasetPolicy policy,
                                             std::uint64_t seed, const ExperimentConfig& base) {
    if (n_users < 1 || sessions_per_user < 1) throw InvalidArgument("dataset counts must be positive");
    ExperimentConfig cfg = base;
    cfg.horizon = sessions_per_user;
    RandomPolicy random;
    FixedPolicy fixed(cfg.canonical_layout());
    LayoutPolicy& p = policy == DatasetPolicy::random ? static_cast<LayoutPolicy&>(random) : fixed;
    p.set_training(false);
    std::vector<EventLogRecord> out;
    for (int u = 0; u < n_users; ++u) {
        const Persona persona = sample_persona(cfg.persona_mix, mix_seed(seed, static_cast<std::uint64_t>(u)));
        Rng rng(mix_seed(mix_seed(seed, 0xda7a), static_cast<std::uint64_t>(u)));
        const auto ep = run_episode(p, persona, cfg, rng, UINT64_MAX, static_cast<std::uint64_t>(u));
        for (const auto& s : ep.sessions) out.push_back(make_record(s, u, s.step, cfg.grid));
    }
    return out;
}

}  // namespace adaptix
