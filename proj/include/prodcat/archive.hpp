#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "prodcat/corpus.hpp"
#include "prodcat/model.hpp"
#include "prodcat/vectorizer.hpp"

namespace prodcat {

// Versioned model container. Layout (little-endian):
//   magic "PNCA", u32 version,
//   producing config as a JSON string,
//   label dictionary (count, then each label),
//   fitted vectorizer, fitted model.
// Numeric arrays are raw IEEE-754 doubles, so a load(save(a)) round trip
// reproduces predictions exactly. Writes go to a temp file renamed into
// place, so interrupted runs leave no partial archive.
struct ModelArchive {
    static constexpr std::uint32_t kVersion = 1;

    nlohmann::json config;
    LabelDictionary labels;
    FittedVectorizer vectorizer;
    std::unique_ptr<Model> model;

    std::string predict_label(const TokenizedDoc& doc) const;

    void save(const std::string& path) const;
    static ModelArchive load(const std::string& path);
};

// Writes content to path atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace prodcat
