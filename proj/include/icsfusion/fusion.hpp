#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "icsfusion/core.hpp"
#include "icsfusion/records.hpp"

namespace icsfusion {

enum class Source { conn, cip, proc };

inline const char* source_name(Source s) {
    switch (s) {
        case Source::conn: return "conn";
        case Source::cip: return "cip";
        case Source::proc: return "proc";
    }
    return "conn";
}

inline std::optional<Source> source_from_name(std::string_view v) {
    if (v == "conn") return Source::conn;
    if (v == "cip") return Source::cip;
    if (v == "proc") return Source::proc;
    return std::nullopt;
}

// How a per-second gap is repaired when a feature has no records that second:
// mean-like features interpolate, count-like features are genuinely zero, and
// categorical features keep an empty symbol (later one-hot encodes to all
// zeros).
enum class FrameKind { numeric_mean, numeric_count, categorical };

struct TsValue {
    double ts;
    double value;
};

struct TsSymbol {
    double ts;
    std::string symbol;
};

// ---------------------------------------------------------------------------
// Per-second aggregation primitives. All of them bucket by floor(ts) over the
// half-open integer axis [start, end). Values inside a bucket are sorted
// before reduction so record order never changes a result bit.
// ---------------------------------------------------------------------------

inline std::vector<std::optional<double>> aggregate_numeric(std::span<const TsValue> records,
                                                            int64_t start, int64_t end) {
    if (end <= start) fail(Errc::no_overlap, "aggregation axis is empty");
    size_t n = static_cast<size_t>(end - start);
    std::vector<std::vector<double>> buckets(n);
    for (const auto& r : records) {
        int64_t s = static_cast<int64_t>(std::floor(r.ts));
        if (s < start || s >= end) continue;
        buckets[static_cast<size_t>(s - start)].push_back(r.value);
    }
    std::vector<std::optional<double>> out(n);
    for (size_t i = 0; i < n; ++i) {
        if (buckets[i].empty()) continue;
        std::sort(buckets[i].begin(), buckets[i].end());
        double sum = 0.0;
        for (double v : buckets[i]) sum += v;
        out[i] = sum / static_cast<double>(buckets[i].size());
    }
    return out;
}

// Mode per second; ties break to the lexicographically smallest symbol. An
// empty string marks a second with no records.
inline std::vector<std::string> aggregate_categorical(std::span<const TsSymbol> records,
                                                      int64_t start, int64_t end) {
    if (end <= start) fail(Errc::no_overlap, "aggregation axis is empty");
    size_t n = static_cast<size_t>(end - start);
    std::vector<std::map<std::string, size_t>> buckets(n);
    for (const auto& r : records) {
        int64_t s = static_cast<int64_t>(std::floor(r.ts));
        if (s < start || s >= end) continue;
        ++buckets[static_cast<size_t>(s - start)][r.symbol];
    }
    std::vector<std::string> out(n);
    for (size_t i = 0; i < n; ++i) {
        size_t best = 0;
        for (const auto& [sym, count] : buckets[i]) {
            if (count > best) {  // map iterates keys in order, so first max wins ties
                best = count;
                out[i] = sym;
            }
        }
    }
    return out;
}

struct WindowStatsParams {
    double theta = 3.0;  // spike threshold in rolling standard deviations
    int window = 60;     // rolling window length in seconds
};

struct WindowStats {
    std::vector<std::optional<double>> stddev;  // population std within each second
    std::vector<std::optional<double>> spike;   // 0/1; missing when the second has no records
};

inline WindowStats derive_window_stats(std::span<const TsValue> records, int64_t start, int64_t end,
                                       const WindowStatsParams& params = {}) {
    if (end <= start) fail(Errc::no_overlap, "aggregation axis is empty");
    size_t n = static_cast<size_t>(end - start);
    std::vector<std::vector<double>> buckets(n);
    for (const auto& r : records) {
        int64_t s = static_cast<int64_t>(std::floor(r.ts));
        if (s < start || s >= end) continue;
        buckets[static_cast<size_t>(s - start)].push_back(r.value);
    }
    std::vector<std::optional<double>> mean(n);
    WindowStats out;
    out.stddev.resize(n);
    out.spike.resize(n);
    for (size_t i = 0; i < n; ++i) {
        auto& b = buckets[i];
        if (b.empty()) continue;
        std::sort(b.begin(), b.end());
        double sum = 0.0;
        for (double v : b) sum += v;
        double m = sum / static_cast<double>(b.size());
        mean[i] = m;
        double ss = 0.0;
        for (double v : b) ss += (v - m) * (v - m);
        out.stddev[i] = std::sqrt(ss / static_cast<double>(b.size()));
    }
    const int w = params.window;
    for (size_t i = 0; i < n; ++i) {
        if (!mean[i]) continue;
        out.spike[i] = 0.0;
        if (static_cast<int>(i) < w) continue;  // warm-up
        if (!mean[i - 1]) continue;
        // rolling std of the per-second means over the prior w seconds
        double sum = 0.0;
        size_t count = 0;
        for (size_t j = i - static_cast<size_t>(w); j < i; ++j) {
            if (mean[j]) {
                sum += *mean[j];
                ++count;
            }
        }
        if (count < 2) continue;
        double m = sum / static_cast<double>(count);
        double ss = 0.0;
        for (size_t j = i - static_cast<size_t>(w); j < i; ++j)
            if (mean[j]) ss += (*mean[j] - m) * (*mean[j] - m);
        double rolling = std::sqrt(ss / static_cast<double>(count));
        if (std::abs(*mean[i] - *mean[i - 1]) > params.theta * rolling) out.spike[i] = 1.0;
    }
    return out;
}

// Linear interpolation of interior gaps; edge gaps copy the nearest present
// value (one-sided gaps have no second neighbor to interpolate against).
inline std::vector<double> interpolate(const std::vector<std::optional<double>>& series) {
    std::vector<double> out(series.size());
    ptrdiff_t prev = -1;
    bool any = false;
    for (size_t i = 0; i < series.size(); ++i) {
        if (!series[i]) continue;
        any = true;
        if (prev < 0) {
            for (size_t j = 0; j <= i; ++j) out[j] = *series[i];  // leading gap
        } else {
            double lo = *series[static_cast<size_t>(prev)];
            double hi = *series[i];
            size_t gap = i - static_cast<size_t>(prev);
            for (size_t j = static_cast<size_t>(prev) + 1; j <= i; ++j)
                out[j] = lo + (hi - lo) * static_cast<double>(j - prev) / static_cast<double>(gap);
        }
        prev = static_cast<ptrdiff_t>(i);
    }
    if (!any) fail(Errc::empty_series, "series has no present value to interpolate from");
    for (size_t j = static_cast<size_t>(prev) + 1; j < series.size(); ++j)
        out[j] = *series[static_cast<size_t>(prev)];  // trailing gap
    return out;
}

// ---------------------------------------------------------------------------
// Aggregated streams and fused frames
// ---------------------------------------------------------------------------

struct FrameColumn {
    std::string name;
    Source source = Source::conn;
    FrameKind kind = FrameKind::numeric_mean;
    std::vector<std::optional<double>> numeric;  // numeric_* kinds
    std::vector<std::string> symbols;            // categorical kind; "" = missing
};

/// One source stream bucketed to its own [start, end) second axis.
struct AggregatedStream {
    Source source = Source::conn;
    int64_t start = 0;
    int64_t end = 0;
    std::vector<FrameColumn> columns;     // unprefixed names
    std::vector<size_t> coverage;         // raw records aggregated per second

    size_t seconds() const { return static_cast<size_t>(end - start); }
};

enum class Label : int { benign = 0, malicious = 1 };

/// Fused, per-second view of the whole system over a unified axis.
struct FrameTable {
    int64_t start = 0;
    int64_t end = 0;
    std::vector<FrameColumn> columns;  // names namespaced `conn.*` / `cip.*` / `proc.*`
    std::vector<int> labels;           // 0/1, empty until label_frames
    std::map<Source, std::vector<size_t>> coverage;

    size_t frames() const { return static_cast<size_t>(end - start); }
    int64_t second_at(size_t row) const { return start + static_cast<int64_t>(row); }

    const FrameColumn& column(std::string_view name) const {
        for (const auto& c : columns)
            if (c.name == name) return c;
        fail(Errc::missing_field, "no fused column named '" + std::string(name) + "'");
    }
};

/// Unified axis = intersection of the stream spans, so no frame is fabricated
/// entirely by interpolation. Column names gain a `<source>.` prefix.
inline FrameTable align(const std::vector<AggregatedStream>& streams) {
    if (streams.empty()) fail(Errc::no_overlap, "no streams to align");
    int64_t start = streams[0].start, end = streams[0].end;
    for (const auto& s : streams) {
        start = std::max(start, s.start);
        end = std::min(end, s.end);
    }
    if (start >= end) fail(Errc::no_overlap, "stream time spans do not intersect");
    FrameTable table;
    table.start = start;
    table.end = end;
    size_t n = static_cast<size_t>(end - start);
    for (const auto& s : streams) {
        size_t offset = static_cast<size_t>(start - s.start);
        for (const auto& col : s.columns) {
            FrameColumn out;
            out.name = std::string(source_name(s.source)) + "." + col.name;
            out.source = s.source;
            out.kind = col.kind;
            if (col.kind == FrameKind::categorical)
                out.symbols.assign(col.symbols.begin() + offset, col.symbols.begin() + offset + n);
            else
                out.numeric.assign(col.numeric.begin() + offset, col.numeric.begin() + offset + n);
            table.columns.push_back(std::move(out));
        }
        auto& cov = table.coverage[s.source];
        cov.assign(s.coverage.begin() + offset, s.coverage.begin() + offset + n);
    }
    return table;
}

inline FrameTable align(const AggregatedStream& network, const AggregatedStream& process) {
    return align(std::vector<AggregatedStream>{network, process});
}

/// Completes every numeric column: mean-like gaps interpolate, count-like
/// gaps become zero.
inline void repair_gaps(FrameTable& table) {
    for (auto& col : table.columns) {
        if (col.kind == FrameKind::numeric_mean) {
            std::vector<double> full;
            try {
                full = interpolate(col.numeric);
            } catch (const Error& e) {
                if (e.code() == Errc::empty_series)
                    fail(Errc::empty_series, "column '" + col.name + "' has no data on the fused axis");
                throw;
            }
            for (size_t i = 0; i < full.size(); ++i) col.numeric[i] = full[i];
        } else if (col.kind == FrameKind::numeric_count) {
            for (auto& v : col.numeric)
                if (!v) v = 0.0;
        }
    }
}

/// label(s) = malicious iff some window satisfies start_ts <= s <= end_ts.
inline void label_frames(FrameTable& table, const std::vector<AttackWindow>& windows) {
    check_windows_disjoint(windows);
    table.labels.assign(table.frames(), 0);
    for (const auto& w : windows) {
        int64_t lo = std::max(w.start_ts, table.start);
        int64_t hi = std::min(w.end_ts, table.end - 1);
        for (int64_t s = lo; s <= hi; ++s) table.labels[static_cast<size_t>(s - table.start)] = 1;
    }
}

// ---------------------------------------------------------------------------
// Stream builders: records -> per-second aggregated features
// ---------------------------------------------------------------------------

namespace detail {

inline void add_numeric(AggregatedStream& s, std::string name, FrameKind kind,
                        std::vector<std::optional<double>> values) {
    FrameColumn c;
    c.name = std::move(name);
    c.source = s.source;
    c.kind = kind;
    c.numeric = std::move(values);
    s.columns.push_back(std::move(c));
}

inline void add_categorical(AggregatedStream& s, std::string name, std::vector<std::string> symbols) {
    FrameColumn c;
    c.name = std::move(name);
    c.source = s.source;
    c.kind = FrameKind::categorical;
    c.symbols = std::move(symbols);
    s.columns.push_back(std::move(c));
}

template <typename Rec>
std::pair<int64_t, int64_t> span_of(const std::vector<Rec>& records) {
    if (records.empty()) fail(Errc::empty_series, "cannot aggregate an empty record stream");
    double lo = records[0].ts, hi = records[0].ts;
    for (const auto& r : records) {
        lo = std::min(lo, r.ts);
        hi = std::max(hi, r.ts);
    }
    return {static_cast<int64_t>(std::floor(lo)), static_cast<int64_t>(std::floor(hi)) + 1};
}

inline std::vector<std::optional<double>> per_second_counts(const std::vector<double>& ts_list,
                                                            int64_t start, int64_t end) {
    std::vector<std::optional<double>> out(static_cast<size_t>(end - start), 0.0);
    for (double ts : ts_list) {
        int64_t s = static_cast<int64_t>(std::floor(ts));
        if (s < start || s >= end) continue;
        *out[static_cast<size_t>(s - start)] += 1.0;
    }
    return out;
}

inline std::vector<std::optional<double>> distinct_per_second(
    const std::vector<std::pair<double, std::string>>& items, int64_t start, int64_t end) {
    std::vector<std::set<std::string>> sets(static_cast<size_t>(end - start));
    for (const auto& [ts, sym] : items) {
        int64_t s = static_cast<int64_t>(std::floor(ts));
        if (s < start || s >= end) continue;
        sets[static_cast<size_t>(s - start)].insert(sym);
    }
    std::vector<std::optional<double>> out(sets.size());
    for (size_t i = 0; i < sets.size(); ++i) out[i] = static_cast<double>(sets[i].size());
    return out;
}

}  // namespace detail

inline AggregatedStream aggregate_conn(const std::vector<ConnRecord>& records) {
    auto [start, end] = detail::span_of(records);
    AggregatedStream s;
    s.source = Source::conn;
    s.start = start;
    s.end = end;
    size_t n = s.seconds();

    std::vector<double> all_ts;
    std::vector<TsValue> durations, orig_bytes, resp_bytes, orig_pkts, resp_pkts;
    std::vector<TsSymbol> protos, states, services, orig_addrs, resp_addrs, orig_ports, resp_ports;
    std::vector<std::pair<double, std::string>> oa_items, ra_items;
    for (const auto& r : records) {
        all_ts.push_back(r.ts);
        if (r.duration) durations.push_back({r.ts, *r.duration});
        if (r.orig_bytes) orig_bytes.push_back({r.ts, static_cast<double>(*r.orig_bytes)});
        if (r.resp_bytes) resp_bytes.push_back({r.ts, static_cast<double>(*r.resp_bytes)});
        if (r.orig_pkts) orig_pkts.push_back({r.ts, static_cast<double>(*r.orig_pkts)});
        if (r.resp_pkts) resp_pkts.push_back({r.ts, static_cast<double>(*r.resp_pkts)});
        protos.push_back({r.ts, proto_name(r.proto)});
        states.push_back({r.ts, r.conn_state});
        if (r.service) services.push_back({r.ts, *r.service});
        orig_addrs.push_back({r.ts, r.orig_addr});
        resp_addrs.push_back({r.ts, r.resp_addr});
        orig_ports.push_back({r.ts, std::to_string(r.orig_port)});
        resp_ports.push_back({r.ts, std::to_string(r.resp_port)});
        oa_items.emplace_back(r.ts, r.orig_addr);
        ra_items.emplace_back(r.ts, r.resp_addr);
    }

    detail::add_numeric(s, "count", FrameKind::numeric_count,
                        detail::per_second_counts(all_ts, start, end));
    detail::add_numeric(s, "duration_mean", FrameKind::numeric_mean,
                        aggregate_numeric(durations, start, end));
    detail::add_numeric(s, "orig_bytes_mean", FrameKind::numeric_mean,
                        aggregate_numeric(orig_bytes, start, end));
    detail::add_numeric(s, "resp_bytes_mean", FrameKind::numeric_mean,
                        aggregate_numeric(resp_bytes, start, end));
    detail::add_numeric(s, "orig_pkts_mean", FrameKind::numeric_mean,
                        aggregate_numeric(orig_pkts, start, end));
    detail::add_numeric(s, "resp_pkts_mean", FrameKind::numeric_mean,
                        aggregate_numeric(resp_pkts, start, end));
    detail::add_numeric(s, "distinct_orig_addr", FrameKind::numeric_count,
                        detail::distinct_per_second(oa_items, start, end));
    detail::add_numeric(s, "distinct_resp_addr", FrameKind::numeric_count,
                        detail::distinct_per_second(ra_items, start, end));
    detail::add_categorical(s, "proto_mode", aggregate_categorical(protos, start, end));
    detail::add_categorical(s, "conn_state_mode", aggregate_categorical(states, start, end));
    detail::add_categorical(s, "service_mode", aggregate_categorical(services, start, end));
    detail::add_categorical(s, "orig_addr_mode", aggregate_categorical(orig_addrs, start, end));
    detail::add_categorical(s, "resp_addr_mode", aggregate_categorical(resp_addrs, start, end));
    detail::add_categorical(s, "orig_port_mode", aggregate_categorical(orig_ports, start, end));
    detail::add_categorical(s, "resp_port_mode", aggregate_categorical(resp_ports, start, end));

    s.coverage.assign(n, 0);
    for (double ts : all_ts) {
        int64_t sec = static_cast<int64_t>(std::floor(ts));
        if (sec >= start && sec < end) ++s.coverage[static_cast<size_t>(sec - start)];
    }
    return s;
}

inline AggregatedStream aggregate_cip(const std::vector<CipRecord>& records) {
    auto [start, end] = detail::span_of(records);
    AggregatedStream s;
    s.source = Source::cip;
    s.start = start;
    s.end = end;
    size_t n = s.seconds();

    std::vector<double> all_ts, write_ts, error_ts;
    std::vector<TsValue> req_lens, resp_lens;
    std::vector<TsSymbol> commands, statuses, orig_addrs, resp_addrs;
    std::vector<std::pair<double, std::string>> oa_items;
    for (const auto& r : records) {
        all_ts.push_back(r.ts);
        req_lens.push_back({r.ts, static_cast<double>(r.request_len)});
        resp_lens.push_back({r.ts, static_cast<double>(r.response_len)});
        commands.push_back({r.ts, r.command});
        if (r.status) statuses.push_back({r.ts, *r.status});
        orig_addrs.push_back({r.ts, r.orig_addr});
        resp_addrs.push_back({r.ts, r.resp_addr});
        oa_items.emplace_back(r.ts, r.orig_addr);
        if (r.command.find("write") != std::string::npos) write_ts.push_back(r.ts);
        if (r.status && *r.status != "success") error_ts.push_back(r.ts);
    }

    detail::add_numeric(s, "count", FrameKind::numeric_count,
                        detail::per_second_counts(all_ts, start, end));
    detail::add_numeric(s, "request_len_mean", FrameKind::numeric_mean,
                        aggregate_numeric(req_lens, start, end));
    detail::add_numeric(s, "response_len_mean", FrameKind::numeric_mean,
                        aggregate_numeric(resp_lens, start, end));
    detail::add_numeric(s, "write_count", FrameKind::numeric_count,
                        detail::per_second_counts(write_ts, start, end));
    detail::add_numeric(s, "error_count", FrameKind::numeric_count,
                        detail::per_second_counts(error_ts, start, end));
    detail::add_numeric(s, "distinct_orig_addr", FrameKind::numeric_count,
                        detail::distinct_per_second(oa_items, start, end));
    detail::add_categorical(s, "command_mode", aggregate_categorical(commands, start, end));
    detail::add_categorical(s, "status_mode", aggregate_categorical(statuses, start, end));
    detail::add_categorical(s, "orig_addr_mode", aggregate_categorical(orig_addrs, start, end));
    detail::add_categorical(s, "resp_addr_mode", aggregate_categorical(resp_addrs, start, end));

    s.coverage.assign(n, 0);
    for (double ts : all_ts) {
        int64_t sec = static_cast<int64_t>(std::floor(ts));
        if (sec >= start && sec < end) ++s.coverage[static_cast<size_t>(sec - start)];
    }
    return s;
}

/// Sensors become <tag>_mean / <tag>_std / <tag>_spike; actuators become a
/// categorical <tag>_state with the {0,1,2} codes as symbols. Samples without
/// a value only mark a gap and are not counted as coverage.
inline AggregatedStream aggregate_proc(const std::vector<ProcessSample>& samples,
                                       const WindowStatsParams& stats_params = {}) {
    std::vector<const ProcessSample*> with_value;
    for (const auto& s : samples)
        if (s.value) with_value.push_back(&s);
    if (with_value.empty()) fail(Errc::empty_series, "process stream has no valued samples");

    double lo = with_value[0]->ts, hi = with_value[0]->ts;
    for (const auto* s : with_value) {
        lo = std::min(lo, s->ts);
        hi = std::max(hi, s->ts);
    }
    int64_t start = static_cast<int64_t>(std::floor(lo));
    int64_t end = static_cast<int64_t>(std::floor(hi)) + 1;

    AggregatedStream out;
    out.source = Source::proc;
    out.start = start;
    out.end = end;
    size_t n = out.seconds();

    // group by tag, preserving first-appearance order
    std::vector<std::string> tag_order;
    std::map<std::string, std::pair<TagKind, std::vector<TsValue>>> by_tag;
    for (const auto* s : with_value) {
        auto it = by_tag.find(s->tag);
        if (it == by_tag.end()) {
            tag_order.push_back(s->tag);
            it = by_tag.emplace(s->tag, std::make_pair(s->kind, std::vector<TsValue>{})).first;
        }
        it->second.second.push_back({s->ts, *s->value});
    }

    for (const auto& tag : tag_order) {
        const auto& [kind, values] = by_tag.at(tag);
        if (kind == TagKind::sensor) {
            detail::add_numeric(out, tag + "_mean", FrameKind::numeric_mean,
                                aggregate_numeric(values, start, end));
            auto stats = derive_window_stats(values, start, end, stats_params);
            detail::add_numeric(out, tag + "_std", FrameKind::numeric_mean, std::move(stats.stddev));
            detail::add_numeric(out, tag + "_spike", FrameKind::numeric_count, std::move(stats.spike));
        } else {
            std::vector<TsSymbol> codes;
            codes.reserve(values.size());
            for (const auto& v : values)
                codes.push_back({v.ts, std::to_string(static_cast<int>(v.value))});
            detail::add_categorical(out, tag + "_state", aggregate_categorical(codes, start, end));
        }
    }

    out.coverage.assign(n, 0);
    for (const auto* s : with_value) {
        int64_t sec = static_cast<int64_t>(std::floor(s->ts));
        if (sec >= start && sec < end) ++out.coverage[static_cast<size_t>(sec - start)];
    }
    return out;
}

}  // namespace icsfusion
