#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "icsfusion/core.hpp"
#include "icsfusion/records.hpp"

namespace icsfusion {

// Process-variable table: header `timestamp,<tag>,...`, then one wide row per
// second. Each row explodes into one ProcessSample per tag; blank cells become
// value-less samples for the fusion stage to interpolate.

struct ProcessParseResult {
    std::vector<ProcessSample> samples;
    std::vector<std::string> tags;   // column order
    size_t rows = 0;
    size_t missing_cells = 0;
};

inline ProcessParseResult parse_process_csv(std::istream& in, const TagRegistry& registry) {
    ProcessParseResult out;
    std::string line;
    if (!std::getline(in, line)) fail(Errc::header_missing, "process CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_view(line, ',');
    if (header.empty() || trim_view(header[0]) != "timestamp")
        fail(Errc::header_missing, "first process CSV column must be 'timestamp'");

    std::vector<TagKind> kinds;
    for (size_t i = 1; i < header.size(); ++i) {
        std::string tag(trim_view(header[i]));
        auto kind = registry.classify(tag);
        if (!kind) fail(Errc::unknown_tag, "tag '" + tag + "' matches no registry prefix");
        out.tags.push_back(tag);
        kinds.push_back(*kind);
    }

    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_view(line, ',');
        if (cells.size() != header.size()) {
            log_warn("process CSV line " + std::to_string(line_no) + ": expected " +
                     std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()) +
                     "; row skipped");
            continue;
        }
        auto ts = parse_double(trim_view(cells[0]));
        if (!ts) {
            log_warn("process CSV line " + std::to_string(line_no) + ": bad timestamp; row skipped");
            continue;
        }
        ++out.rows;
        for (size_t i = 0; i < out.tags.size(); ++i) {
            ProcessSample s;
            s.ts = *ts;
            s.tag = out.tags[i];
            s.kind = kinds[i];
            std::string_view cell = trim_view(cells[i + 1]);
            if (cell.empty()) {
                ++out.missing_cells;
            } else {
                auto v = parse_double(cell);
                if (!v) {
                    log_warn("process CSV line " + std::to_string(line_no) + ": cell '" +
                             std::string(cell) + "' for " + s.tag + " is not numeric; treated as missing");
                    ++out.missing_cells;
                } else if (kinds[i] == TagKind::actuator &&
                           (*v != 0.0 && *v != 1.0 && *v != 2.0)) {
                    log_warn("process CSV line " + std::to_string(line_no) + ": actuator " + s.tag +
                             " code " + std::string(cell) + " outside {0,1,2}; treated as missing");
                    ++out.missing_cells;
                } else {
                    s.value = *v;
                }
            }
            out.samples.push_back(std::move(s));
        }
    }
    return out;
}

inline ProcessParseResult parse_process_csv(const std::string& text, const TagRegistry& registry) {
    std::istringstream in(text);
    return parse_process_csv(in, registry);
}

// Writer used by the simulator: rows must share the exact tag order.
inline void write_process_header(std::ostream& out, const std::vector<std::string>& tags) {
    out << "timestamp";
    for (const auto& t : tags) out << ',' << t;
    out << "\n";
}

inline void write_process_row(std::ostream& out, int64_t ts, const std::vector<std::string>& cells) {
    out << ts;
    for (const auto& c : cells) out << ',' << c;
    out << "\n";
}

// ---------------------------------------------------------------------------
// Attack schedule CSV: id,start_ts,end_ts,category,description
// ---------------------------------------------------------------------------

inline std::vector<AttackWindow> parse_attack_csv(std::istream& in) {
    std::vector<AttackWindow> out;
    std::string line;
    bool first = true;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("id,", 0) == 0) continue;  // header row
        }
        auto cells = split_view(line, ',');
        if (cells.size() < 5)
            fail(Errc::io_error, "attack CSV line " + std::to_string(line_no) + ": expected 5 columns");
        AttackWindow w;
        w.id = std::string(cells[0]);
        auto s = parse_i64(cells[1]), e = parse_i64(cells[2]);
        if (!s || !e)
            fail(Errc::io_error, "attack CSV line " + std::to_string(line_no) + ": bad timestamps");
        w.start_ts = *s;
        w.end_ts = *e;
        if (w.start_ts > w.end_ts)
            fail(Errc::io_error, "attack window '" + w.id + "' has start_ts > end_ts");
        w.category = std::string(cells[3]);
        // description may itself contain commas
        std::string desc(cells[4]);
        for (size_t i = 5; i < cells.size(); ++i) desc += "," + std::string(cells[i]);
        w.description = desc;
        out.push_back(std::move(w));
    }
    check_windows_disjoint(out);
    return out;
}

inline std::vector<AttackWindow> parse_attack_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_attack_csv(in);
}

inline void write_attack_csv(std::ostream& out, const std::vector<AttackWindow>& windows) {
    out << "id,start_ts,end_ts,category,description\n";
    for (const auto& w : windows)
        out << w.id << ',' << w.start_ts << ',' << w.end_ts << ',' << w.category << ','
            << w.description << "\n";
}

}  // namespace icsfusion
