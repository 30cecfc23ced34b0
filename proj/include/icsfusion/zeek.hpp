#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "icsfusion/core.hpp"
#include "icsfusion/records.hpp"

namespace icsfusion {

// ---------------------------------------------------------------------------
// Zeek TSV log framing. A log starts with directive lines:
//   #separator \x09
//   #set_separator<SEP>,
//   #empty_field<SEP>(empty)
//   #unset_field<SEP>-
//   #path<SEP>conn
//   #fields<SEP>ts<SEP>uid<SEP>...
//   #types<SEP>time<SEP>string<SEP>...
// followed by one data line per record and an optional #close.
// ---------------------------------------------------------------------------

enum class ZeekType { time, interval, count, int_, string_, addr, port, enum_, bool_ };

inline const char* zeek_type_name(ZeekType t) {
    switch (t) {
        case ZeekType::time: return "time";
        case ZeekType::interval: return "interval";
        case ZeekType::count: return "count";
        case ZeekType::int_: return "int";
        case ZeekType::string_: return "string";
        case ZeekType::addr: return "addr";
        case ZeekType::port: return "port";
        case ZeekType::enum_: return "enum";
        case ZeekType::bool_: return "bool";
    }
    return "string";
}

inline std::optional<ZeekType> zeek_type_from_name(std::string_view s) {
    if (s == "time") return ZeekType::time;
    if (s == "interval") return ZeekType::interval;
    if (s == "count") return ZeekType::count;
    if (s == "int") return ZeekType::int_;
    if (s == "string") return ZeekType::string_;
    if (s == "addr") return ZeekType::addr;
    if (s == "port") return ZeekType::port;
    if (s == "enum") return ZeekType::enum_;
    if (s == "bool") return ZeekType::bool_;
    return std::nullopt;
}

struct ZeekSchema {
    char separator = '\t';
    std::string set_separator = ",";
    std::string unset_marker = "-";
    std::string empty_marker = "(empty)";
    std::string path;
    std::vector<std::string> field_names;
    std::vector<ZeekType> field_types;

    size_t size() const { return field_names.size(); }

    std::optional<size_t> index_of(std::string_view name) const {
        for (size_t i = 0; i < field_names.size(); ++i)
            if (field_names[i] == name) return i;
        return std::nullopt;
    }

    size_t require(std::string_view name) const {
        auto idx = index_of(name);
        if (!idx) fail(Errc::missing_field, "log lacks required field '" + std::string(name) + "'");
        return *idx;
    }
};

// Decodes the value of a #separator directive: either a literal character or
// a \xNN hex escape (the convention Zeek itself uses).
inline char decode_separator(std::string_view v) {
    if (v.size() == 4 && v[0] == '\\' && (v[1] == 'x' || v[1] == 'X')) {
        auto hex = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            return -1;
        };
        int hi = hex(v[2]), lo = hex(v[3]);
        if (hi >= 0 && lo >= 0) return static_cast<char>(hi * 16 + lo);
    }
    if (v.size() == 1) return v[0];
    fail(Errc::schema_mismatch, "cannot decode separator value '" + std::string(v) + "'");
}

inline std::string encode_separator(char sep) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "\\x%02x", static_cast<unsigned char>(sep));
    return buf;
}

/// Builds a schema from the directive lines of a log (lines beginning '#').
/// Non-directive lines in the input are ignored so callers may pass whole
/// file prefixes.
inline ZeekSchema parse_zeek_header(const std::vector<std::string>& lines) {
    ZeekSchema schema;
    bool have_fields = false, have_types = false;
    for (const auto& raw : lines) {
        std::string_view line = trim_view(raw);
        if (line.empty() || line[0] != '#') continue;
        // #separator uses a space before its value; every other directive is
        // separated by the (already declared) separator byte.
        if (line.rfind("#separator", 0) == 0) {
            std::string_view v = trim_view(line.substr(std::string_view("#separator").size()));
            schema.separator = decode_separator(v);
            continue;
        }
        auto fields = split_view(line, schema.separator);
        std::string_view directive = fields[0];
        auto value_at = [&](size_t i) -> std::string_view {
            return i < fields.size() ? fields[i] : std::string_view{};
        };
        if (directive == "#set_separator") {
            schema.set_separator = std::string(value_at(1));
        } else if (directive == "#unset_field") {
            schema.unset_marker = std::string(value_at(1));
        } else if (directive == "#empty_field") {
            schema.empty_marker = std::string(value_at(1));
        } else if (directive == "#path") {
            schema.path = std::string(value_at(1));
        } else if (directive == "#fields") {
            schema.field_names.assign(fields.begin() + 1, fields.end());
            have_fields = true;
        } else if (directive == "#types") {
            schema.field_types.clear();
            for (size_t i = 1; i < fields.size(); ++i) {
                auto t = zeek_type_from_name(fields[i]);
                if (!t) fail(Errc::schema_mismatch, "unknown zeek type '" + std::string(fields[i]) + "'");
                schema.field_types.push_back(*t);
            }
            have_types = true;
        }
        // #open / #close / unknown directives are tolerated and ignored.
    }
    if (!have_fields) fail(Errc::missing_directive, "#fields directive absent");
    if (!have_types) fail(Errc::missing_directive, "#types directive absent");
    if (schema.field_names.size() != schema.field_types.size())
        fail(Errc::schema_mismatch, std::to_string(schema.field_names.size()) + " field names vs " +
                                        std::to_string(schema.field_types.size()) + " types");
    if (schema.field_names.empty()) fail(Errc::schema_mismatch, "empty field list");
    for (size_t i = 0; i < schema.field_names.size(); ++i)
        for (size_t j = i + 1; j < schema.field_names.size(); ++j)
            if (schema.field_names[i] == schema.field_names[j])
                fail(Errc::schema_mismatch, "duplicate field name '" + schema.field_names[i] + "'");
    return schema;
}

// ---------------------------------------------------------------------------
// Per-file parse bookkeeping. Malformed lines are skipped and tallied, never
// fatal: ICS captures routinely end in a truncated line.
// ---------------------------------------------------------------------------

struct SkippedLine {
    size_t line_no;  // 1-based within the file
    std::string reason;
};

struct ParseReport {
    size_t data_lines = 0;
    size_t emitted = 0;
    std::vector<SkippedLine> skipped;
    std::map<std::string, size_t> unset_counts;  // field name -> '-' occurrences

    size_t skipped_count() const { return skipped.size(); }
};

namespace detail {

struct LineContext {
    const ZeekSchema& schema;
    const std::vector<std::string_view>& fields;
    ParseReport& report;

    std::string_view raw(size_t idx) const { return fields[idx]; }

    bool is_unset(size_t idx, const std::string& name) {
        if (fields[idx] == schema.unset_marker) {
            ++report.unset_counts[name];
            return true;
        }
        return false;
    }

    std::string get_string(size_t idx) const {
        std::string_view v = fields[idx];
        if (v == schema.empty_marker) return "";
        return std::string(v);
    }

    double get_time(size_t idx, const std::string& name) const {
        auto v = parse_double(fields[idx]);
        if (!v) throw Error(Errc::bad_config, "field '" + name + "' is not a time value");
        return *v;
    }
};

// Thrown internally for a single bad line; converted into a skip entry.
struct LineTypeError {
    std::string reason;
};

inline double need_double(std::string_view v, const char* name) {
    auto d = parse_double(v);
    if (!d) throw LineTypeError{std::string(name) + " '" + std::string(v) + "' is not numeric"};
    return *d;
}

inline uint64_t need_count(std::string_view v, const char* name) {
    auto c = parse_u64(v);
    if (!c) throw LineTypeError{std::string(name) + " '" + std::string(v) + "' is not a count"};
    return *c;
}

inline uint16_t need_port(std::string_view v, const char* name) {
    auto c = parse_u64(v);
    if (!c || *c > 65535) throw LineTypeError{std::string(name) + " '" + std::string(v) + "' is not a port"};
    return static_cast<uint16_t>(*c);
}

// Generic single-pass scaffold over a Zeek TSV stream. Calls on_schema once
// the directives are complete and on_line for every data line.
template <typename OnSchema, typename OnLine>
void scan_zeek_stream(std::istream& in, ParseReport& report, OnSchema&& on_schema, OnLine&& on_line) {
    std::vector<std::string> directives;
    std::optional<ZeekSchema> schema;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] == '#') {
            directives.push_back(line);
            continue;
        }
        if (line.empty()) continue;
        if (!schema) {
            schema = parse_zeek_header(directives);
            on_schema(*schema);
        }
        ++report.data_lines;
        auto fields = split_view(line, schema->separator);
        if (fields.size() != schema->size()) {
            std::string reason = "FieldCount: got " + std::to_string(fields.size()) + ", schema has " +
                                 std::to_string(schema->size());
            log_warn("line " + std::to_string(line_no) + " skipped: " + reason);
            report.skipped.push_back({line_no, reason});
            continue;
        }
        try {
            on_line(*schema, fields);
            ++report.emitted;
        } catch (const LineTypeError& e) {
            std::string reason = "TypeError: " + e.reason;
            log_warn("line " + std::to_string(line_no) + " skipped: " + reason);
            report.skipped.push_back({line_no, reason});
        }
    }
    if (!schema) {
        // header-only (or empty) file: still validate the directives
        schema = parse_zeek_header(directives);
        on_schema(*schema);
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// conn.log
// ---------------------------------------------------------------------------

struct ConnParseResult {
    std::vector<ConnRecord> records;
    ParseReport report;
    ZeekSchema schema;
};

inline ConnParseResult parse_conn_log(std::istream& in) {
    ConnParseResult out;
    struct Idx {
        size_t ts, uid, orig_h, orig_p, resp_h, resp_p, proto, duration, orig_bytes, resp_bytes,
            conn_state, orig_pkts, resp_pkts;
        std::optional<size_t> service;
    } idx{};
    detail::scan_zeek_stream(
        in, out.report,
        [&](const ZeekSchema& s) {
            out.schema = s;
            idx.ts = s.require("ts");
            idx.uid = s.require("uid");
            idx.orig_h = s.require("id.orig_h");
            idx.orig_p = s.require("id.orig_p");
            idx.resp_h = s.require("id.resp_h");
            idx.resp_p = s.require("id.resp_p");
            idx.proto = s.require("proto");
            idx.duration = s.require("duration");
            idx.orig_bytes = s.require("orig_bytes");
            idx.resp_bytes = s.require("resp_bytes");
            idx.conn_state = s.require("conn_state");
            idx.orig_pkts = s.require("orig_pkts");
            idx.resp_pkts = s.require("resp_pkts");
            idx.service = s.index_of("service");
        },
        [&](const ZeekSchema& s, const std::vector<std::string_view>& f) {
            detail::LineContext ctx{s, f, out.report};
            ConnRecord r;
            r.ts = detail::need_double(f[idx.ts], "ts");
            if (r.ts <= 0) throw detail::LineTypeError{"ts must be positive"};
            r.uid = ctx.get_string(idx.uid);
            r.orig_addr = ctx.get_string(idx.orig_h);
            r.orig_port = detail::need_port(f[idx.orig_p], "id.orig_p");
            r.resp_addr = ctx.get_string(idx.resp_h);
            r.resp_port = detail::need_port(f[idx.resp_p], "id.resp_p");
            auto proto = proto_from_name(f[idx.proto]);
            if (!proto) throw detail::LineTypeError{"unknown proto '" + std::string(f[idx.proto]) + "'"};
            r.proto = *proto;
            if (idx.service && !ctx.is_unset(*idx.service, "service"))
                r.service = ctx.get_string(*idx.service);
            if (!ctx.is_unset(idx.duration, "duration"))
                r.duration = detail::need_double(f[idx.duration], "duration");
            if (r.duration && *r.duration < 0) throw detail::LineTypeError{"negative duration"};
            if (!ctx.is_unset(idx.orig_bytes, "orig_bytes"))
                r.orig_bytes = detail::need_count(f[idx.orig_bytes], "orig_bytes");
            if (!ctx.is_unset(idx.resp_bytes, "resp_bytes"))
                r.resp_bytes = detail::need_count(f[idx.resp_bytes], "resp_bytes");
            r.conn_state = ctx.get_string(idx.conn_state);
            if (!ctx.is_unset(idx.orig_pkts, "orig_pkts"))
                r.orig_pkts = detail::need_count(f[idx.orig_pkts], "orig_pkts");
            if (!ctx.is_unset(idx.resp_pkts, "resp_pkts"))
                r.resp_pkts = detail::need_count(f[idx.resp_pkts], "resp_pkts");
            out.records.push_back(std::move(r));
        });
    return out;
}

inline ConnParseResult parse_conn_log(const std::string& text) {
    std::istringstream in(text);
    return parse_conn_log(in);
}

// ---------------------------------------------------------------------------
// cip.log
// ---------------------------------------------------------------------------

struct CipParseResult {
    std::vector<CipRecord> records;
    ParseReport report;
    ZeekSchema schema;
};

inline CipParseResult parse_cip_log(std::istream& in) {
    CipParseResult out;
    struct Idx {
        size_t ts, uid, orig_h, resp_h, command, status, request_len, response_len;
    } idx{};
    detail::scan_zeek_stream(
        in, out.report,
        [&](const ZeekSchema& s) {
            out.schema = s;
            idx.ts = s.require("ts");
            idx.uid = s.require("uid");
            idx.orig_h = s.require("id.orig_h");
            idx.resp_h = s.require("id.resp_h");
            idx.command = s.require("cip_service");
            idx.status = s.require("cip_status");
            idx.request_len = s.require("request_len");
            idx.response_len = s.require("response_len");
        },
        [&](const ZeekSchema& s, const std::vector<std::string_view>& f) {
            detail::LineContext ctx{s, f, out.report};
            CipRecord r;
            r.ts = detail::need_double(f[idx.ts], "ts");
            if (r.ts <= 0) throw detail::LineTypeError{"ts must be positive"};
            r.uid = ctx.get_string(idx.uid);
            r.orig_addr = ctx.get_string(idx.orig_h);
            r.resp_addr = ctx.get_string(idx.resp_h);
            r.command = ctx.get_string(idx.command);
            if (!ctx.is_unset(idx.status, "cip_status")) r.status = ctx.get_string(idx.status);
            r.request_len = detail::need_count(f[idx.request_len], "request_len");
            r.response_len = detail::need_count(f[idx.response_len], "response_len");
            out.records.push_back(std::move(r));
        });
    return out;
}

inline CipParseResult parse_cip_log(const std::string& text) {
    std::istringstream in(text);
    return parse_cip_log(in);
}

// ---------------------------------------------------------------------------
// Writers. The canonical schemas below are what the simulator emits; parsed
// records serialized with the same schema re-parse field-identically.
// ---------------------------------------------------------------------------

inline ZeekSchema canonical_conn_schema() {
    ZeekSchema s;
    s.path = "conn";
    s.field_names = {"ts",       "uid",        "id.orig_h", "id.orig_p", "id.resp_h",
                     "id.resp_p", "proto",     "service",   "duration",  "orig_bytes",
                     "resp_bytes", "conn_state", "orig_pkts", "resp_pkts"};
    s.field_types = {ZeekType::time,  ZeekType::string_, ZeekType::addr,  ZeekType::port,
                     ZeekType::addr,  ZeekType::port,    ZeekType::enum_, ZeekType::string_,
                     ZeekType::interval, ZeekType::count, ZeekType::count, ZeekType::string_,
                     ZeekType::count, ZeekType::count};
    return s;
}

inline ZeekSchema canonical_cip_schema() {
    ZeekSchema s;
    s.path = "cip";
    s.field_names = {"ts", "uid", "id.orig_h", "id.resp_h", "cip_service", "cip_status",
                     "request_len", "response_len"};
    s.field_types = {ZeekType::time,  ZeekType::string_, ZeekType::addr,  ZeekType::addr,
                     ZeekType::string_, ZeekType::string_, ZeekType::count, ZeekType::count};
    return s;
}

inline void write_zeek_header(std::ostream& out, const ZeekSchema& s) {
    const char sep = s.separator;
    out << "#separator " << encode_separator(sep) << "\n";
    out << "#set_separator" << sep << s.set_separator << "\n";
    out << "#empty_field" << sep << s.empty_marker << "\n";
    out << "#unset_field" << sep << s.unset_marker << "\n";
    if (!s.path.empty()) out << "#path" << sep << s.path << "\n";
    out << "#fields";
    for (const auto& n : s.field_names) out << sep << n;
    out << "\n#types";
    for (const auto& t : s.field_types) out << sep << zeek_type_name(t);
    out << "\n";
}

namespace detail {

inline std::string field_or_empty(const ZeekSchema& s, const std::string& v) {
    return v.empty() ? s.empty_marker : v;
}

}  // namespace detail

inline void write_conn_record(std::ostream& out, const ZeekSchema& s, const ConnRecord& r) {
    const char sep = s.separator;
    out << format_fixed(r.ts, 6) << sep << detail::field_or_empty(s, r.uid) << sep
        << detail::field_or_empty(s, r.orig_addr) << sep << r.orig_port << sep
        << detail::field_or_empty(s, r.resp_addr) << sep << r.resp_port << sep << proto_name(r.proto)
        << sep << (r.service ? detail::field_or_empty(s, *r.service) : s.unset_marker) << sep
        << (r.duration ? format_fixed(*r.duration, 6) : s.unset_marker) << sep
        << (r.orig_bytes ? std::to_string(*r.orig_bytes) : s.unset_marker) << sep
        << (r.resp_bytes ? std::to_string(*r.resp_bytes) : s.unset_marker) << sep
        << detail::field_or_empty(s, r.conn_state) << sep
        << (r.orig_pkts ? std::to_string(*r.orig_pkts) : s.unset_marker) << sep
        << (r.resp_pkts ? std::to_string(*r.resp_pkts) : s.unset_marker) << "\n";
}

inline void write_cip_record(std::ostream& out, const ZeekSchema& s, const CipRecord& r) {
    const char sep = s.separator;
    out << format_fixed(r.ts, 6) << sep << detail::field_or_empty(s, r.uid) << sep
        << detail::field_or_empty(s, r.orig_addr) << sep << detail::field_or_empty(s, r.resp_addr)
        << sep << detail::field_or_empty(s, r.command) << sep
        << (r.status ? detail::field_or_empty(s, *r.status) : s.unset_marker) << sep << r.request_len
        << sep << r.response_len << "\n";
}

inline void write_conn_log(std::ostream& out, const std::vector<ConnRecord>& records) {
    ZeekSchema s = canonical_conn_schema();
    write_zeek_header(out, s);
    for (const auto& r : records) write_conn_record(out, s, r);
}

inline void write_cip_log(std::ostream& out, const std::vector<CipRecord>& records) {
    ZeekSchema s = canonical_cip_schema();
    write_zeek_header(out, s);
    for (const auto& r : records) write_cip_record(out, s, r);
}

}  // namespace icsfusion
