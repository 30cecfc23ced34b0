#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "icsfusion/core.hpp"
#include "icsfusion/fusion.hpp"

namespace icsfusion {

using json = nlohmann::json;

enum class ColumnKind { numeric, indicator };

struct FeatureColumn {
    std::string name;
    Source source = Source::conn;
    ColumnKind kind = ColumnKind::numeric;

    bool operator==(const FeatureColumn&) const = default;
};

enum class SplitTag { none, train, test };

/// Model-ready matrix: named, provenance-tagged columns over fused frames.
struct FeatureMatrix {
    std::vector<FeatureColumn> columns;
    Matrix values;
    std::vector<int> labels;        // 0 benign / 1 malicious
    std::vector<int64_t> seconds;
    std::vector<SplitTag> split;    // empty until a split is applied

    size_t rows() const { return values.rows(); }
    size_t cols() const { return values.cols(); }

    std::optional<size_t> column_index(std::string_view name) const {
        for (size_t i = 0; i < columns.size(); ++i)
            if (columns[i].name == name) return i;
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// Identifier dropping (glob patterns against namespaced column names)
// ---------------------------------------------------------------------------

inline bool glob_match(std::string_view pattern, std::string_view text) {
    if (pattern.empty()) return text.empty();
    if (pattern[0] == '*') {
        for (size_t i = 0; i <= text.size(); ++i)
            if (glob_match(pattern.substr(1), text.substr(i))) return true;
        return false;
    }
    if (text.empty() || pattern[0] != text[0]) return false;
    return glob_match(pattern.substr(1), text.substr(1));
}

// Raw endpoint identities dilute per-second aggregates; derived counts such as
// distinct_orig_addr stay.
inline std::vector<std::string> default_drop_list() {
    return {"*.orig_addr_mode", "*.resp_addr_mode", "*.uid*", "*.orig_port_mode", "*.resp_port_mode"};
}

inline FrameTable drop_identifiers(FrameTable table, const std::vector<std::string>& drop_list) {
    std::vector<FrameColumn> kept;
    for (auto& col : table.columns) {
        bool dropped = false;
        for (const auto& pattern : drop_list) {
            if (glob_match(pattern, col.name)) {
                dropped = true;
                break;
            }
        }
        if (!dropped) kept.push_back(std::move(col));
    }
    table.columns = std::move(kept);
    return table;
}

// ---------------------------------------------------------------------------
// One-hot encoding
// ---------------------------------------------------------------------------

/// Per-column symbol vocabularies, fitted on training rows only.
struct Vocabulary {
    std::map<std::string, std::vector<std::string>> by_column;  // sorted symbol lists

    bool operator==(const Vocabulary&) const = default;
};

inline Vocabulary fit_vocabularies(const FrameTable& table, std::span<const size_t> train_rows) {
    Vocabulary vocab;
    for (const auto& col : table.columns) {
        if (col.kind != FrameKind::categorical) continue;
        std::set<std::string> seen;
        for (size_t r : train_rows) {
            const std::string& sym = col.symbols[r];
            if (!sym.empty()) seen.insert(sym);
        }
        vocab.by_column[col.name] = {seen.begin(), seen.end()};
    }
    return vocab;
}

/// One indicator row per symbol; all zeros for a symbol outside the vocabulary
/// (so unseen test-time protocol values never crash the pipeline).
inline std::vector<std::vector<double>> one_hot(const std::vector<std::string>& symbols,
                                                const std::vector<std::string>& vocabulary) {
    std::vector<std::vector<double>> out(symbols.size(), std::vector<double>(vocabulary.size(), 0.0));
    for (size_t r = 0; r < symbols.size(); ++r) {
        for (size_t c = 0; c < vocabulary.size(); ++c) {
            if (symbols[r] == vocabulary[c]) {
                out[r][c] = 1.0;
                break;
            }
        }
    }
    return out;
}

/// FrameTable -> FeatureMatrix. Numeric columns pass through (they must be
/// gap-free by now); categorical columns expand to `<name>=<symbol>`
/// indicators over the fitted vocabulary.
inline FeatureMatrix encode_features(const FrameTable& table, const Vocabulary& vocab) {
    FeatureMatrix out;
    size_t n = table.frames();
    for (const auto& col : table.columns) {
        if (col.kind == FrameKind::categorical) {
            auto it = vocab.by_column.find(col.name);
            if (it == vocab.by_column.end())
                fail(Errc::missing_field, "no vocabulary fitted for column '" + col.name + "'");
            for (const auto& sym : it->second)
                out.columns.push_back({col.name + "=" + sym, col.source, ColumnKind::indicator});
        } else {
            out.columns.push_back({col.name, col.source, ColumnKind::numeric});
        }
    }
    out.values = Matrix(n, out.columns.size());
    size_t c = 0;
    for (const auto& col : table.columns) {
        if (col.kind == FrameKind::categorical) {
            const auto& symbols = vocab.by_column.at(col.name);
            for (size_t r = 0; r < n; ++r) {
                for (size_t k = 0; k < symbols.size(); ++k)
                    if (col.symbols[r] == symbols[k]) out.values.at(r, c + k) = 1.0;
            }
            c += symbols.size();
        } else {
            for (size_t r = 0; r < n; ++r) {
                if (!col.numeric[r])
                    fail(Errc::empty_series, "column '" + col.name + "' still has gaps at encode time");
                out.values.at(r, c) = *col.numeric[r];
            }
            ++c;
        }
    }
    out.labels = table.labels.empty() ? std::vector<int>(n, 0) : table.labels;
    out.seconds.resize(n);
    for (size_t r = 0; r < n; ++r) out.seconds[r] = table.second_at(r);
    return out;
}

// ---------------------------------------------------------------------------
// Min-max normalization
// ---------------------------------------------------------------------------

struct NormalizerState {
    std::vector<double> min;
    std::vector<double> max;
    size_t fitted_on = 0;

    bool operator==(const NormalizerState&) const = default;
};

inline NormalizerState fit_minmax(const Matrix& values, std::span<const size_t> train_rows) {
    if (train_rows.empty()) fail(Errc::too_few_rows, "min-max fit needs at least one training row");
    NormalizerState st;
    st.fitted_on = train_rows.size();
    st.min.assign(values.cols(), std::numeric_limits<double>::infinity());
    st.max.assign(values.cols(), -std::numeric_limits<double>::infinity());
    for (size_t r : train_rows) {
        for (size_t c = 0; c < values.cols(); ++c) {
            st.min[c] = std::min(st.min[c], values.at(r, c));
            st.max[c] = std::max(st.max[c], values.at(r, c));
        }
    }
    return st;
}

/// x' = (x - min) / (max - min); constant columns map to 0 and out-of-range
/// test values clip to [0, 1].
inline void apply_minmax(Matrix& values, const NormalizerState& st) {
    if (st.min.size() != values.cols())
        fail(Errc::dimension_mismatch, "normalizer fitted on " + std::to_string(st.min.size()) +
                                           " columns, matrix has " + std::to_string(values.cols()));
    for (size_t c = 0; c < values.cols(); ++c) {
        double range = st.max[c] - st.min[c];
        for (size_t r = 0; r < values.rows(); ++r) {
            double& x = values.at(r, c);
            x = range > 0 ? (x - st.min[c]) / range : 0.0;
            x = std::clamp(x, 0.0, 1.0);
        }
    }
}

// ---------------------------------------------------------------------------
// Dataset configurations (which source streams feed the model)
// ---------------------------------------------------------------------------

enum class DatasetConfig { conn_only, cip_only, proc_only, conn_cip, conn_proc, conn_cip_proc };

inline const char* dataset_config_name(DatasetConfig c) {
    switch (c) {
        case DatasetConfig::conn_only: return "conn_only";
        case DatasetConfig::cip_only: return "cip_only";
        case DatasetConfig::proc_only: return "proc_only";
        case DatasetConfig::conn_cip: return "conn_cip";
        case DatasetConfig::conn_proc: return "conn_proc";
        case DatasetConfig::conn_cip_proc: return "conn_cip_proc";
    }
    return "conn_cip_proc";
}

inline std::optional<DatasetConfig> dataset_config_from_name(std::string_view v) {
    if (v == "conn_only") return DatasetConfig::conn_only;
    if (v == "cip_only") return DatasetConfig::cip_only;
    if (v == "proc_only" || v == "process_only") return DatasetConfig::proc_only;
    if (v == "conn_cip" || v == "network_only" || v == "combined_conn_cip") return DatasetConfig::conn_cip;
    if (v == "conn_proc" || v == "combined_conn_proc") return DatasetConfig::conn_proc;
    if (v == "conn_cip_proc" || v == "combined_all") return DatasetConfig::conn_cip_proc;
    return std::nullopt;
}

inline std::set<Source> dataset_config_sources(DatasetConfig c) {
    switch (c) {
        case DatasetConfig::conn_only: return {Source::conn};
        case DatasetConfig::cip_only: return {Source::cip};
        case DatasetConfig::proc_only: return {Source::proc};
        case DatasetConfig::conn_cip: return {Source::conn, Source::cip};
        case DatasetConfig::conn_proc: return {Source::conn, Source::proc};
        case DatasetConfig::conn_cip_proc: return {Source::conn, Source::cip, Source::proc};
    }
    return {};
}

inline std::vector<DatasetConfig> all_dataset_configs() {
    return {DatasetConfig::conn_only, DatasetConfig::cip_only,  DatasetConfig::proc_only,
            DatasetConfig::conn_cip,  DatasetConfig::conn_proc, DatasetConfig::conn_cip_proc};
}

inline bool is_single_source(DatasetConfig c) {
    return c == DatasetConfig::conn_only || c == DatasetConfig::cip_only ||
           c == DatasetConfig::proc_only;
}

inline FeatureMatrix select_sources(const FeatureMatrix& m, const std::set<Source>& sources) {
    std::vector<size_t> keep;
    for (size_t c = 0; c < m.columns.size(); ++c)
        if (sources.count(m.columns[c].source)) keep.push_back(c);
    if (keep.empty()) fail(Errc::empty_selection, "no columns match the requested sources");
    FeatureMatrix out;
    for (size_t c : keep) out.columns.push_back(m.columns[c]);
    out.values = Matrix(m.rows(), keep.size());
    for (size_t r = 0; r < m.rows(); ++r)
        for (size_t i = 0; i < keep.size(); ++i) out.values.at(r, i) = m.values.at(r, keep[i]);
    out.labels = m.labels;
    out.seconds = m.seconds;
    out.split = m.split;
    return out;
}

inline FeatureMatrix select_config(const FeatureMatrix& m, DatasetConfig config) {
    return select_sources(m, dataset_config_sources(config));
}

// ---------------------------------------------------------------------------
// Preprocessing manifest (JSON) so a trained model re-applies bit-compatibly
// ---------------------------------------------------------------------------

struct PreprocessState {
    std::vector<std::string> drop_list;
    Vocabulary vocabulary;
    NormalizerState normalizer;
    std::vector<FeatureColumn> columns;  // encoded column list, pre-selection

    bool operator==(const PreprocessState&) const = default;
};

inline json to_json(const FeatureColumn& c) {
    return json{{"name", c.name},
                {"source", source_name(c.source)},
                {"kind", c.kind == ColumnKind::numeric ? "numeric" : "indicator"}};
}

inline FeatureColumn feature_column_from_json(const json& j) {
    FeatureColumn c;
    c.name = j.at("name").get<std::string>();
    auto src = source_from_name(j.at("source").get<std::string>());
    if (!src) fail(Errc::bad_config, "bad column source in manifest");
    c.source = *src;
    c.kind = j.at("kind").get<std::string>() == "indicator" ? ColumnKind::indicator
                                                            : ColumnKind::numeric;
    return c;
}

inline json to_json(const PreprocessState& st) {
    json cols = json::array();
    for (const auto& c : st.columns) cols.push_back(to_json(c));
    json vocab = json::object();
    for (const auto& [name, syms] : st.vocabulary.by_column) vocab[name] = syms;
    return json{{"drop_list", st.drop_list},
                {"vocabularies", vocab},
                {"normalizer",
                 {{"min", st.normalizer.min},
                  {"max", st.normalizer.max},
                  {"fitted_on", st.normalizer.fitted_on}}},
                {"columns", cols}};
}

inline PreprocessState preprocess_state_from_json(const json& j) {
    PreprocessState st;
    st.drop_list = j.at("drop_list").get<std::vector<std::string>>();
    for (auto it = j.at("vocabularies").begin(); it != j.at("vocabularies").end(); ++it)
        st.vocabulary.by_column[it.key()] = it.value().get<std::vector<std::string>>();
    st.normalizer.min = j.at("normalizer").at("min").get<std::vector<double>>();
    st.normalizer.max = j.at("normalizer").at("max").get<std::vector<double>>();
    st.normalizer.fitted_on = j.at("normalizer").at("fitted_on").get<size_t>();
    for (const auto& c : j.at("columns")) st.columns.push_back(feature_column_from_json(c));
    return st;
}

}  // namespace icsfusion
