#include "prodcat/archive.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "prodcat/binary_io.hpp"

namespace prodcat {

namespace {
constexpr char kMagic[4] = {'P', 'N', 'C', 'A'};
}

std::string ModelArchive::predict_label(const TokenizedDoc& doc) const {
    int predicted = model->predict(vectorizer.transform(doc));
    return labels.names[static_cast<std::size_t>(predicted)];
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("cannot write file: " + tmp);
        out << content;
        if (!out) {
            std::remove(tmp.c_str());
            throw DataError("write failed: " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw DataError("cannot move output into place: " + path);
    }
}

void ModelArchive::save(const std::string& path) const {
    std::ostringstream buffer;
    BinaryWriter w(buffer);
    buffer.write(kMagic, 4);
    w.u32(kVersion);
    w.str(config.dump());
    w.u64(labels.names.size());
    for (const auto& name : labels.names) w.str(name);
    vectorizer.save(w);
    model->save(w);
    write_file_atomic(path, buffer.str());
}

ModelArchive ModelArchive::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open archive: " + path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
        throw DataError("not a model archive: " + path);
    }
    BinaryReader r(in);
    std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw DataError("unsupported archive version " + std::to_string(version) +
                        " (supported: " + std::to_string(kVersion) + ")");
    }
    ModelArchive archive;
    archive.config = nlohmann::json::parse(r.str());
    std::uint64_t n_labels = r.u64();
    for (std::uint64_t i = 0; i < n_labels; ++i) archive.labels.add(r.str());
    archive.vectorizer = FittedVectorizer::load(r);
    archive.model = Model::load(r);
    return archive;
}

}  // namespace prodcat
