#include "prodcat/corpus_gen.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "prodcat/common.hpp"
#include "prodcat/csv.hpp"
#include "prodcat/rng.hpp"

namespace prodcat {

namespace {

// Disjoint keyword pools: with noise_rate 0 every generated name contains at
// least one word unique to its category.
const std::vector<std::vector<std::string>> kPools = {
    {"lapte", "iaurt", "kefir", "sana", "unt", "smantana", "branza", "cascaval", "telemea"},
    {"paine", "bagheta", "chifle", "covrigi", "lipie", "franzela", "cozonac", "grisine"},
    {"rosii", "castraveti", "ardei", "ceapa", "cartofi", "morcovi", "varza", "vinete", "dovlecei"},
    {"mere", "pere", "banane", "portocale", "capsuni", "struguri", "pepene", "piersici", "caise"},
    {"pui", "porc", "vita", "mici", "carnati", "sunca", "salam", "pastrama", "pulpe"},
    {"somon", "crap", "pastrav", "hering", "macrou", "ton", "sardine", "dorada"},
    {"ciocolata", "bomboane", "napolitane", "prajitura", "jeleuri", "halva", "turta"},
    {"apa", "suc", "limonada", "nectar", "sirop", "cafea", "ceai", "cacao"},
    {"compot", "zacusca", "bulion", "mustar", "ketchup", "maioneza", "pate", "masline"},
    {"orez", "paste", "faina", "malai", "gris", "fulgi", "musli", "spaghete"},
    {"ulei", "otet", "margarina", "seminte", "susan", "floarea", "rapita"},
    {"sare", "piper", "boia", "cimbru", "oregano", "scortisoara", "vanilie", "usturoi"},
    {"frigider", "congelator", "aragaz", "cuptor", "hota", "lada", "vitrina"},
    {"mixer", "blender", "prajitor", "fierbator", "storcator", "espressor", "cantar"},
    {"detergent", "sapun", "sampon", "balsam", "clor", "odorizant", "servetele"},
};

const std::vector<std::string> kBrands = {
    "zuzu",   "fulga",  "napolact", "covalact", "delaco", "hochland", "arctic", "beko",
    "bosch",  "philips", "tefal",   "heinz",    "barilla", "olympia",  "cristim", "agricola",
};

const std::vector<std::string> kSizes = {
    "500g", "1kg",  "250g", "330ml", "1l",  "2l",   "750ml", "100g",
    "6buc", "x4",   "1.5l", "200g",  "5kg", "900ml", "300g",  "10buc",
};

const std::vector<std::string> kFillers = {
    "proaspat", "bio", "eco", "premium", "oferta", "clasic", "traditional", "extra", "nou",
};

std::vector<std::string> build_category_names() {
    std::vector<std::string> names = {
        "lactate",  "panificatie", "legume",     "fructe",        "carne",
        "peste",    "dulciuri",    "bauturi",    "conserve",      "cereale",
        "uleiuri",  "condimente",  "electro_mari", "electro_mici", "curatenie",
    };
    return names;
}

std::string capitalize(const std::string& word) {
    std::string out = word;
    if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') {
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    }
    return out;
}

}  // namespace

const std::vector<std::string>& corpus_category_names() {
    static const std::vector<std::string> names = build_category_names();
    return names;
}

std::vector<int> corpus_class_counts(const CorpusSpec& spec) {
    if (spec.classes < 2) throw ValidationError("gen-corpus: classes must be >= 2");
    if (spec.classes > static_cast<int>(kPools.size())) {
        throw ValidationError("gen-corpus: at most " + std::to_string(kPools.size()) +
                              " categories are available");
    }
    if (spec.size < spec.classes) throw ValidationError("gen-corpus: size must be >= classes");

    std::vector<double> weights = spec.imbalance;
    if (weights.empty()) {
        // mild imbalance, roughly 2.4x between the largest and smallest class
        for (int c = 0; c < spec.classes; ++c) {
            weights.push_back(1.0 + 0.1 * static_cast<double>(spec.classes - 1 - c));
        }
    }
    if (static_cast<int>(weights.size()) != spec.classes) {
        throw ValidationError("gen-corpus: imbalance profile must list one weight per class");
    }
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double w : weights) {
        if (!(w > 0.0)) throw ValidationError("gen-corpus: imbalance weights must be > 0");
    }

    // largest-remainder apportionment; remainder ties go to the lowest class
    std::vector<int> counts(static_cast<std::size_t>(spec.classes));
    std::vector<std::pair<double, int>> remainders;
    int assigned = 0;
    for (int c = 0; c < spec.classes; ++c) {
        double exact = static_cast<double>(spec.size) * weights[static_cast<std::size_t>(c)] / total;
        counts[static_cast<std::size_t>(c)] = static_cast<int>(exact);
        assigned += counts[static_cast<std::size_t>(c)];
        remainders.emplace_back(exact - static_cast<double>(counts[static_cast<std::size_t>(c)]), c);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int left = spec.size - assigned, i = 0; left > 0; --left, ++i) {
        ++counts[static_cast<std::size_t>(remainders[static_cast<std::size_t>(i)].second)];
    }
    return counts;
}

void generate_corpus(const CorpusSpec& spec, std::ostream& out) {
    if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0) {
        throw ValidationError("gen-corpus: noise rate must be in [0,1]");
    }
    auto counts = corpus_class_counts(spec);
    const auto& names = corpus_category_names();
    Rng rng(spec.seed);

    CsvTable table;
    table.header = {"name", "category"};
    for (int c = 0; c < spec.classes; ++c) {
        const auto& pool = kPools[static_cast<std::size_t>(c)];
        for (int i = 0; i < counts[static_cast<std::size_t>(c)]; ++i) {
            std::ostringstream name;
            name << capitalize(pool[rng.below(pool.size())]);
            if (rng.uniform() < 0.35) name << " " << pool[rng.below(pool.size())];
            if (rng.uniform() < 0.6) name << " " << capitalize(kBrands[rng.below(kBrands.size())]);
            if (rng.uniform() < 0.4) name << " " << kFillers[rng.below(kFillers.size())];
            if (rng.uniform() < 0.7) name << " " << kSizes[rng.below(kSizes.size())];
            if (spec.noise_rate > 0.0 && rng.uniform() < spec.noise_rate) {
                // a keyword leaked from another category
                std::size_t other =
                    (static_cast<std::size_t>(c) + 1 + rng.below(static_cast<std::uint64_t>(spec.classes - 1))) %
                    static_cast<std::size_t>(spec.classes);
                const auto& other_pool = kPools[other];
                name << " " << other_pool[rng.below(other_pool.size())];
            }
            table.rows.push_back({name.str(), names[static_cast<std::size_t>(c)]});
        }
    }
    write_csv(out, table);
}

void generate_corpus_file(const CorpusSpec& spec, const std::string& path) {
    std::ostringstream buffer;
    generate_corpus(spec, buffer);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write file: " + tmp);
        out << buffer.str();
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw DataError("cannot move output into place: " + path);
    }
}

}  // namespace prodcat
