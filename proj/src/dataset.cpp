#include "falsifier/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "falsifier/error.hpp"
#include "falsifier/hash.hpp"
#include "falsifier/random.hpp"

namespace falsifier {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

std::string cell_ref(std::size_t row, std::string_view column) {
    return "row " + std::to_string(row) + ", column '" + std::string(column) + "'";
}

}  // namespace

std::string_view to_string(OutcomeRole role) noexcept {
    return role == OutcomeRole::Permissible ? "permissible" : "impermissible";
}

std::string_view to_string(SplitRole role) noexcept {
    return role == SplitRole::Calibration ? "calibration" : "evaluation";
}

EvalDataset::EvalDataset(std::vector<double> scores, std::vector<OutcomeSpec> outcomes,
                         std::vector<std::vector<std::uint8_t>> labels,
                         std::vector<SplitRole> split)
    : scores_(std::move(scores)),
      outcomes_(std::move(outcomes)),
      labels_(std::move(labels)) {
    if (scores_.empty()) fail(ErrorCode::EmptyDataset, "dataset has no records");
    if (outcomes_.size() != labels_.size())
        fail(ErrorCode::InternalError, "outcome count does not match label columns");

    std::set<std::string> names;
    std::size_t n_perm = 0;
    std::size_t n_imperm = 0;
    for (const auto& o : outcomes_) {
        if (!names.insert(o.name).second)
            fail(ErrorCode::ConfigError, "outcome '" + o.name + "' declared twice");
        (o.role == OutcomeRole::Permissible ? n_perm : n_imperm) += 1;
    }
    if (n_perm == 0) fail(ErrorCode::ConfigError, "at least one permissible outcome is required");
    if (n_imperm == 0) fail(ErrorCode::ConfigError, "at least one impermissible outcome is required");

    for (std::size_t i = 0; i < scores_.size(); ++i) {
        if (!std::isfinite(scores_[i]))
            fail(ErrorCode::NonFiniteScore, "non-finite score at record " + std::to_string(i + 1));
    }
    for (std::size_t j = 0; j < labels_.size(); ++j) {
        if (labels_[j].size() != scores_.size())
            fail(ErrorCode::InternalError, "label column '" + outcomes_[j].name + "' has wrong length");
        for (std::size_t i = 0; i < labels_[j].size(); ++i) {
            if (labels_[j][i] > 1)
                fail(ErrorCode::NonBinaryLabel, "non-binary label at " + cell_ref(i + 1, outcomes_[j].name));
        }
    }
    if (!split.empty()) *this = with_split(std::move(split));
}

std::span<const std::uint8_t> EvalDataset::labels(std::size_t outcome) const {
    return labels_.at(outcome);
}

std::span<const std::uint8_t> EvalDataset::labels(std::string_view name) const {
    return labels_[outcome_index(name)];
}

std::size_t EvalDataset::outcome_index(std::string_view name) const {
    for (std::size_t j = 0; j < outcomes_.size(); ++j) {
        if (outcomes_[j].name == name) return j;
    }
    fail(ErrorCode::ConfigError, "unknown outcome '" + std::string(name) + "'");
}

bool EvalDataset::has_outcome(std::string_view name) const noexcept {
    return std::any_of(outcomes_.begin(), outcomes_.end(),
                       [&](const OutcomeSpec& o) { return o.name == name; });
}

EvalRecord EvalDataset::record(std::size_t i) const {
    EvalRecord r;
    r.score = scores_.at(i);
    for (std::size_t j = 0; j < outcomes_.size(); ++j) r.labels[outcomes_[j].name] = labels_[j][i];
    return r;
}

std::vector<std::size_t> EvalDataset::indices(SplitRole role) const {
    std::vector<std::size_t> out;
    if (split_.empty()) {
        // Unsplit data is treated as all-evaluation.
        if (role == SplitRole::Evaluation) {
            out.resize(size());
            std::iota(out.begin(), out.end(), std::size_t{0});
        }
        return out;
    }
    for (std::size_t i = 0; i < split_.size(); ++i) {
        if (split_[i] == role) out.push_back(i);
    }
    return out;
}

EvalDataset EvalDataset::with_split(std::vector<SplitRole> split) const {
    if (split.size() != size())
        fail(ErrorCode::InternalError, "split assignment length does not match dataset");
    const auto n_cal = static_cast<std::size_t>(
        std::count(split.begin(), split.end(), SplitRole::Calibration));
    const std::size_t n_eval = split.size() - n_cal;
    if (n_cal < 2 || n_eval < 2) {
        fail(ErrorCode::SplitTooSmall,
             "split leaves " + std::to_string(n_cal) + " calibration and " +
                 std::to_string(n_eval) + " evaluation records; each needs at least 2");
    }
    for (std::size_t j = 0; j < outcomes_.size(); ++j) {
        bool seen[2] = {false, false};
        for (std::size_t i = 0; i < split.size(); ++i) {
            if (split[i] == SplitRole::Calibration) seen[labels_[j][i]] = true;
        }
        if (!seen[0] || !seen[1]) {
            fail(ErrorCode::DegenerateCalibrationLabels,
                 "outcome '" + outcomes_[j].name + "' has a single label value in the calibration split");
        }
    }
    EvalDataset out = *this;
    out.split_ = std::move(split);
    return out;
}

EvalDataset EvalDataset::select(std::span<const std::string> permissibles,
                                std::string_view impermissible) const {
    if (permissibles.empty()) fail(ErrorCode::ConfigError, "at least one permissible outcome is required");
    std::set<std::string> used{std::string(impermissible)};
    std::vector<std::size_t> cols{outcome_index(impermissible)};
    for (const auto& p : permissibles) {
        if (!used.insert(p).second)
            fail(ErrorCode::ConfigError, "outcome '" + p + "' bound more than once in a run");
        cols.push_back(outcome_index(p));
    }
    EvalDataset out;
    out.scores_ = scores_;
    out.split_ = split_;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        out.outcomes_.push_back({outcomes_[cols[k]].name,
                                 k == 0 ? OutcomeRole::Impermissible : OutcomeRole::Permissible});
        out.labels_.push_back(labels_[cols[k]]);
    }
    return out;
}

std::size_t EvalDataset::impermissible_index() const {
    std::optional<std::size_t> found;
    for (std::size_t j = 0; j < outcomes_.size(); ++j) {
        if (outcomes_[j].role != OutcomeRole::Impermissible) continue;
        if (found) fail(ErrorCode::ConfigError, "more than one impermissible outcome in a single run");
        found = j;
    }
    if (!found) fail(ErrorCode::ConfigError, "no impermissible outcome declared");
    return *found;
}

std::string EvalDataset::fingerprint() const {
    Fnv1a h;
    h.update_u64(size());
    for (const auto& o : outcomes_) {
        h.update(o.name);
        h.update(to_string(o.role));
    }
    for (double s : scores_) h.update(s);
    for (const auto& col : labels_) h.update(col.data(), col.size());
    for (SplitRole r : split_) h.update_u64(static_cast<std::uint64_t>(r));
    return h.hex();
}

std::vector<std::vector<std::string>> parse_csv_rows(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    // Leading "#" lines (such as the manifest line on emitted files) are skipped.
    while (text.starts_with('#')) {
        const auto nl = text.find('\n');
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    std::size_t line = 1;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        // Blank lines carry no record.
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || field_was_quoted)
                    fail(ErrorCode::ParseError, "stray quote on line " + std::to_string(line));
                in_quotes = true;
                field_was_quoted = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_row();
                ++line;
                break;
            case '\n':
                end_row();
                ++line;
                break;
            default:
                if (field_was_quoted)
                    fail(ErrorCode::ParseError, "text after closing quote on line " + std::to_string(line));
                field.push_back(c);
        }
    }
    if (in_quotes) fail(ErrorCode::ParseError, "unterminated quoted field");
    if (!field.empty() || field_was_quoted || !row.empty()) end_row();
    return rows;
}

namespace {

double parse_score(std::string_view raw, std::size_t row, std::string_view column) {
    std::string_view s = trim(raw);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        fail(ErrorCode::MalformedScore, "unparseable score '" + std::string(raw) + "' at " + cell_ref(row, column));
    if (!std::isfinite(value))
        fail(ErrorCode::NonFiniteScore, "non-finite score at " + cell_ref(row, column));
    return value;
}

std::uint8_t parse_label(std::string_view raw, const LabelTokens& tokens, std::size_t row,
                         std::string_view column) {
    const std::string_view s = trim(raw);
    for (const auto& t : tokens.true_tokens)
        if (iequals(s, t)) return 1;
    for (const auto& t : tokens.false_tokens)
        if (iequals(s, t)) return 0;
    fail(ErrorCode::NonBinaryLabel, "non-binary label '" + std::string(raw) + "' at " + cell_ref(row, column));
}

SplitRole parse_role(std::string_view raw, std::size_t row, std::string_view column) {
    const std::string_view s = trim(raw);
    if (iequals(s, "calibration")) return SplitRole::Calibration;
    if (iequals(s, "evaluation")) return SplitRole::Evaluation;
    fail(ErrorCode::ParseError, "split role must be 'calibration' or 'evaluation', got '" +
                                    std::string(raw) + "' at " + cell_ref(row, column));
}

}  // namespace

EvalDataset parse_csv(std::string_view text, const CsvLoadOptions& options) {
    const auto rows = parse_csv_rows(text);
    if (rows.empty()) fail(ErrorCode::EmptyDataset, "CSV has no header row");
    const auto& header = rows.front();

    auto column = [&](const std::string& name) -> std::size_t {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (trim(header[c]) == name) return c;
        }
        fail(ErrorCode::MissingColumn, "missing column '" + name + "'");
    };

    const std::size_t score_c = column(options.score_col);
    std::vector<std::size_t> outcome_c;
    for (const auto& o : options.outcomes) outcome_c.push_back(column(o.name));
    std::optional<std::size_t> role_c;
    if (options.role_col) role_c = column(*options.role_col);

    if (rows.size() < 2) fail(ErrorCode::EmptyDataset, "CSV has a header but no records");

    std::vector<double> scores;
    std::vector<std::vector<std::uint8_t>> labels(options.outcomes.size());
    std::vector<SplitRole> roles;
    scores.reserve(rows.size() - 1);

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        if (fields.size() > header.size())
            fail(ErrorCode::ParseError, "record " + std::to_string(r) + " has more fields than the header");
        auto cell = [&](std::size_t c, std::string_view name) -> std::string_view {
            if (c >= fields.size() || trim(fields[c]).empty())
                fail(ErrorCode::MissingCell, "missing value at " + cell_ref(r, name));
            return fields[c];
        };
        scores.push_back(parse_score(cell(score_c, options.score_col), r, options.score_col));
        for (std::size_t j = 0; j < options.outcomes.size(); ++j) {
            const auto& name = options.outcomes[j].name;
            labels[j].push_back(parse_label(cell(outcome_c[j], name), options.tokens, r, name));
        }
        if (role_c) roles.push_back(parse_role(cell(*role_c, *options.role_col), r, *options.role_col));
    }
    return EvalDataset(std::move(scores), options.outcomes, std::move(labels), std::move(roles));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

EvalDataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& options) {
    return parse_csv(read_file(path), options);
}

EvalDataset split(const EvalDataset& dataset, double calibration_fraction, std::uint64_t seed) {
    if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0))
        fail(ErrorCode::ConfigError, "calibration fraction must lie in (0, 1)");
    const std::size_t n = dataset.size();
    const auto n_cal = static_cast<std::size_t>(std::llround(calibration_fraction * static_cast<double>(n)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_stream(seed, StreamTag::Split, 0);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[uniform_below(rng, i)]);
    }
    std::vector<SplitRole> roles(n, SplitRole::Evaluation);
    for (std::size_t k = 0; k < n_cal; ++k) roles[order[k]] = SplitRole::Calibration;
    return dataset.with_split(std::move(roles));
}

}  // namespace falsifier
