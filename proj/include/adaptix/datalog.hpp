#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "adaptix/experiment.hpp"
#include "adaptix/layout.hpp"
#include "json.hpp"

namespace adaptix {

inline constexpr const char* kEventSchema = "adaptix-events";
inline constexpr int kEventSchemaVersion = 1;

// One logged session.
struct EventLogRecord {
    std::int64_t user_id = 0;
    std::int64_t session_id = 0;
    int step = 0;  // session index within the episode
    LayoutState layout;
    GridConfig grid;
    std::vector<int> clicks;  // component ids
    double dwell_norm = 0.0;
    bool retained = false;
    double reward = 0.0;

    friend bool operator==(const EventLogRecord&, const EventLogRecord&) = default;
};

nlohmann::json record_to_json(const EventLogRecord& r);
// `line` is only used for error reporting.
EventLogRecord record_from_json(const nlohmann::json& j, std::size_t line = 0);

EventLogRecord make_record(const SessionRecord& s, std::int64_t user_id, std::int64_t session_id,
                           const GridConfig& grid);

// Streaming JSONL writer; the header line is written on open.
class EventLogWriter {
public:
    explicit EventLogWriter(const std::filesystem::path& path);  // throws IoError
    void write(const EventLogRecord& r);
    void close();
    std::size_t written() const { return written_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t written_ = 0;
};

void write_records(const std::filesystem::path& path, const std::vector<EventLogRecord>& records);
// Throws ParseError (malformed line) or ValidationError (invariant), both
// carrying the 1-based line number; IoError when unreadable.
std::vector<EventLogRecord> read_records(const std::filesystem::path& path);

// Streams harness sessions with per-user running session ids. Held-out users
// are logged as user_id = eval_user_offset + index so they never collide with
// training users.
class SessionLogger {
public:
    SessionLogger(const std::filesystem::path& path, GridConfig grid, std::int64_t eval_user_offset)
        : writer_(path), grid_(grid), eval_offset_(eval_user_offset) {}
    void operator()(Phase phase, const SessionRecord& s);
    void close() { writer_.close(); }

private:
    EventLogWriter writer_;
    GridConfig grid_;
    std::int64_t eval_offset_;
    std::map<std::int64_t, std::int64_t> next_session_;
};

enum class DatasetPolicy { random, fixed_default };

// n_users episodes of up to sessions_per_user sessions under a non-learning
// policy; `base` supplies K, grid, persona mix, reward weights and layout seed.
std::vector<EventLogRecord> generate_dataset(int n_users, int sessions_per_user, DatasetPolicy policy,
                                             std::uint64_t seed, const ExperimentConfig& base = {});

}  // namespace adaptix
