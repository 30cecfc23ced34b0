#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icsfusion/core.hpp"

namespace icsfusion {

enum class Proto { tcp, udp, icmp };

inline const char* proto_name(Proto p) {
    switch (p) {
        case Proto::tcp: return "tcp";
        case Proto::udp: return "udp";
        case Proto::icmp: return "icmp";
    }
    return "tcp";
}

inline std::optional<Proto> proto_from_name(std::string_view s) {
    if (s == "tcp") return Proto::tcp;
    if (s == "udp") return Proto::udp;
    if (s == "icmp") return Proto::icmp;
    return std::nullopt;
}

/// One connection summary line from a Zeek conn.log (Purdue level 3).
struct ConnRecord {
    double ts = 0.0;  // fractional epoch seconds
    std::string uid;
    std::string orig_addr;
    uint16_t orig_port = 0;
    std::string resp_addr;
    uint16_t resp_port = 0;
    Proto proto = Proto::tcp;
    std::optional<std::string> service;
    std::optional<double> duration;
    std::optional<uint64_t> orig_bytes;
    std::optional<uint64_t> resp_bytes;
    std::string conn_state;
    std::optional<uint64_t> orig_pkts;
    std::optional<uint64_t> resp_pkts;

    bool operator==(const ConnRecord&) const = default;
};

/// One CIP request/response summary from a Zeek cip.log (Purdue level 1-2).
struct CipRecord {
    double ts = 0.0;
    std::string uid;
    std::string orig_addr;
    std::string resp_addr;
    std::string command;                 // CIP service name, e.g. read-tag / write-tag
    std::optional<std::string> status;   // response code name; unset in truncated captures
    uint64_t request_len = 0;
    uint64_t response_len = 0;

    bool operator==(const CipRecord&) const = default;
};

enum class TagKind { sensor, actuator };

/// One (timestamp, tag) cell of the 1 Hz process table (Purdue level 0).
/// A blank CSV cell becomes a sample with no value; fusion interpolates it.
struct ProcessSample {
    double ts = 0.0;
    std::string tag;
    TagKind kind = TagKind::sensor;
    std::optional<double> value;

    bool operator==(const ProcessSample&) const = default;
};

/// Ground-truth labeled interval. Bounds are inclusive on both ends.
struct AttackWindow {
    std::string id;
    int64_t start_ts = 0;
    int64_t end_ts = 0;
    std::string category;  // network | process | cross-layer
    std::string description;

    bool contains(int64_t second) const { return second >= start_ts && second <= end_ts; }
};

// Throws on overlapping windows; labeling and the simulator both require a
// non-overlapping schedule.
inline void check_windows_disjoint(const std::vector<AttackWindow>& windows) {
    std::vector<const AttackWindow*> sorted;
    sorted.reserve(windows.size());
    for (const auto& w : windows) sorted.push_back(&w);
    std::sort(sorted.begin(), sorted.end(),
              [](const AttackWindow* a, const AttackWindow* b) { return a->start_ts < b->start_ts; });
    for (size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->start_ts <= sorted[i - 1]->end_ts)
            fail(Errc::window_overlap, "attack windows '" + sorted[i - 1]->id + "' and '" +
                                           sorted[i]->id + "' overlap");
    }
}

// ---------------------------------------------------------------------------
// Tag registry: maps process tag names to sensor/actuator via prefix rules.
// Longest matching prefix wins, so PIT101 is a sensor even though P101 is a
// pump.
// ---------------------------------------------------------------------------

class TagRegistry {
public:
    TagRegistry() = default;

    static TagRegistry defaults() {
        TagRegistry r;
        for (const char* p : {"FIT", "LIT", "AIT", "PIT", "DPIT"}) r.add_prefix(p, TagKind::sensor);
        for (const char* p : {"P", "MV", "UV"}) r.add_prefix(p, TagKind::actuator);
        return r;
    }

    void add_prefix(std::string prefix, TagKind kind) {
        rules_.push_back({std::move(prefix), kind});
    }

    std::optional<TagKind> classify(std::string_view tag) const {
        const Rule* best = nullptr;
        for (const auto& rule : rules_) {
            if (tag.substr(0, rule.prefix.size()) == rule.prefix) {
                if (!best || rule.prefix.size() > best->prefix.size()) best = &rule;
            }
        }
        if (!best) return std::nullopt;
        return best->kind;
    }

    struct Rule {
        std::string prefix;
        TagKind kind;
    };
    const std::vector<Rule>& rules() const { return rules_; }

private:
    std::vector<Rule> rules_;
};

}  // namespace icsfusion
