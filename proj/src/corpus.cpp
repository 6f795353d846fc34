#include "prodcat/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "prodcat/common.hpp"
#include "prodcat/csv.hpp"
#include "prodcat/rng.hpp"
#include "prodcat/utf8.hpp"

namespace prodcat {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

char32_t lower_codepoint(char32_t cp) {
    if (cp < 0x80) {
        if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
        return cp;
    }
    // Latin-1 supplement
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    // Latin Extended-A case pairs
    if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
        return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
        return (cp % 2 == 1) ? cp + 1 : cp;
    }
    if (cp == 0x178) return 0xFF;
    // Romanian comma-below letters
    if (cp == 0x218) return 0x219;
    if (cp == 0x21A) return 0x21B;
    return cp;
}

// Base-letter mapping for Latin-1 accents plus the Romanian set (both the
// comma-below and the legacy cedilla forms). Applied after lowercasing.
char32_t fold_codepoint(char32_t cp) {
    switch (cp) {
        case 0xE0: case 0xE1: case 0xE2: case 0xE3: case 0xE4: case 0xE5: return 'a';
        case 0xE7: return 'c';
        case 0xE8: case 0xE9: case 0xEA: case 0xEB: return 'e';
        case 0xEC: case 0xED: case 0xEE: case 0xEF: return 'i';
        case 0xF1: return 'n';
        case 0xF2: case 0xF3: case 0xF4: case 0xF5: case 0xF6: return 'o';
        case 0xF9: case 0xFA: case 0xFB: case 0xFC: return 'u';
        case 0xFD: case 0xFF: return 'y';
        case 0x101: case 0x103: case 0x105: return 'a';
        case 0x107: case 0x109: case 0x10B: case 0x10D: return 'c';
        case 0x113: case 0x115: case 0x117: case 0x119: case 0x11B: return 'e';
        case 0x12B: case 0x12D: case 0x12F: return 'i';
        case 0x144: case 0x146: case 0x148: return 'n';
        case 0x14D: case 0x14F: case 0x151: return 'o';
        case 0x15F: case 0x161: case 0x219: return 's';
        case 0x163: case 0x165: case 0x21B: return 't';
        case 0x16B: case 0x16D: case 0x16F: case 0x171: case 0x173: return 'u';
        case 0x17A: case 0x17C: case 0x17E: return 'z';
        default: return cp;
    }
}

// Non-ASCII codepoints count as word characters except common Unicode
// whitespace/punctuation blocks; ASCII keeps only alphanumerics.
bool is_word_codepoint(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    if (cp == 0xA0 || cp == 0xAB || cp == 0xBB || cp == 0xB7 || cp == 0xFFFD) return false;
    if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation
    if (cp == 0x2212) return false;                  // minus sign
    return true;
}

}  // namespace

LoadResult load_csv(const std::string& path, const CsvSchema& schema) {
    CsvTable table = read_csv(path);
    int text_col = table.column(schema.text_column);
    if (text_col < 0) throw DataError("missing column '" + schema.text_column + "' in " + path);
    int label_col = table.column(schema.label_column);
    if (label_col < 0) throw DataError("missing column '" + schema.label_column + "' in " + path);

    LoadResult result;
    result.records.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        std::string text = trim(table.rows[i][static_cast<std::size_t>(text_col)]);
        std::string label = trim(table.rows[i][static_cast<std::size_t>(label_col)]);
        if (text.empty() || label.empty()) {
            ++result.skipped_rows;
            result.diagnostics.push_back("data row " + std::to_string(i + 1) + " skipped: empty " +
                                         (text.empty() ? "text" : "label") + " field");
            continue;
        }
        result.records.push_back({std::move(text), std::move(label)});
    }
    return result;
}

std::vector<std::string> tokenize(const std::string& text, const TokenizerConfig& config) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = utf8_next(text, i);
        if (is_word_codepoint(cp)) {
            cp = lower_codepoint(cp);
            if (config.fold_diacritics) cp = fold_codepoint(cp);
            utf8_append(current, cp);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> word_ngrams(const std::vector<std::string>& tokens, int max_n) {
    if (max_n < 1) throw ValidationError("word_ngrams: max_n must be >= 1");
    std::vector<std::string> out;
    const std::size_t count = tokens.size();
    for (int n = 1; n <= max_n; ++n) {
        if (static_cast<std::size_t>(n) > count) break;
        for (std::size_t start = 0; start + n <= count; ++start) {
            if (n == 1) {
                out.push_back(tokens[start]);
                continue;
            }
            std::string term = tokens[start];
            for (int j = 1; j < n; ++j) {
                term.push_back(kNgramSeparator);
                term += tokens[start + j];
            }
            out.push_back(std::move(term));
        }
    }
    return out;
}

int LabelDictionary::add(const std::string& label) {
    auto it = index.find(label);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(names.size());
    names.push_back(label);
    index.emplace(label, id);
    return id;
}

int LabelDictionary::find(const std::string& label) const {
    auto it = index.find(label);
    return it == index.end() ? -1 : it->second;
}

IngestResult ingest(const std::vector<RawRecord>& records, const TokenizerConfig& config) {
    IngestResult result;
    result.docs.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::vector<std::string> tokens = tokenize(records[i].text, config);
        if (tokens.empty()) {
            ++result.empty_docs;
            result.diagnostics.push_back("record " + std::to_string(i + 1) +
                                         " rejected: no tokens in \"" + records[i].text + "\"");
            continue;
        }
        TokenizedDoc doc;
        doc.tokens = std::move(tokens);
        doc.label = result.labels.add(records[i].label);
        result.docs.push_back(std::move(doc));
    }
    return result;
}

namespace {

std::vector<std::vector<std::size_t>> group_by_class(const std::vector<TokenizedDoc>& docs) {
    int n_classes = 0;
    for (const auto& d : docs) n_classes = std::max(n_classes, d.label + 1);
    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(n_classes));
    for (std::size_t i = 0; i < docs.size(); ++i) {
        groups[static_cast<std::size_t>(docs[i].label)].push_back(i);
    }
    return groups;
}

}  // namespace

SplitResult split(const std::vector<TokenizedDoc>& docs, double test_fraction, std::uint64_t seed,
                  bool stratified) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ValidationError("split: test_fraction must be in (0,1)");
    }
    if (docs.empty()) throw ValidationError("split: no records");

    Rng rng(seed);
    SplitResult result;
    if (!stratified) {
        std::vector<std::size_t> order(docs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        std::size_t n_test =
            static_cast<std::size_t>(std::llround(static_cast<double>(docs.size()) * test_fraction));
        result.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
        result.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    } else {
        auto groups = group_by_class(docs);
        for (std::size_t c = 0; c < groups.size(); ++c) {
            if (groups[c].size() < 2) {
                throw ValidationError("split: class index " + std::to_string(c) +
                                      " has fewer than 2 records; cannot stratify");
            }
        }
        for (auto& group : groups) {
            rng.shuffle(group);
            std::size_t n_test = static_cast<std::size_t>(
                std::llround(static_cast<double>(group.size()) * test_fraction));
            for (std::size_t i = 0; i < group.size(); ++i) {
                (i < n_test ? result.test : result.train).push_back(group[i]);
            }
        }
        std::sort(result.train.begin(), result.train.end());
        std::sort(result.test.begin(), result.test.end());
    }
    return result;
}

FoldPlan make_folds(const std::vector<TokenizedDoc>& docs, int k, std::uint64_t seed,
                    bool stratified) {
    if (k < 2) throw ValidationError("make_folds: k must be >= 2");
    if (static_cast<std::size_t>(k) > docs.size()) {
        throw ValidationError("make_folds: k = " + std::to_string(k) + " exceeds record count " +
                              std::to_string(docs.size()));
    }

    Rng rng(seed);
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignment.assign(docs.size(), -1);

    if (!stratified) {
        std::vector<std::size_t> order(docs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        for (std::size_t j = 0; j < order.size(); ++j) {
            plan.assignment[order[j]] = static_cast<int>(j % static_cast<std::size_t>(k));
        }
    } else {
        // Dealing continues across classes so global fold sizes stay within 1.
        auto groups = group_by_class(docs);
        int next_fold = 0;
        for (auto& group : groups) {
            rng.shuffle(group);
            for (std::size_t idx : group) {
                plan.assignment[idx] = next_fold;
                next_fold = (next_fold + 1) % k;
            }
        }
    }
    return plan;
}

}  // namespace prodcat
