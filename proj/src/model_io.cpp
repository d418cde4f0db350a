#include "mseg/model_io.hpp"

#include <cstring>
#include <fstream>

#include "mseg/errors.hpp"

namespace mseg {

namespace {

// CRC32 (IEEE, reflected), table computed on first use.
std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
    static std::uint32_t table[256];
    static bool init = false;
    if (!init) {
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            table[i] = c;
        }
        init = true;
    }
    std::uint32_t crc = 0xffffffffu;
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xffu] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
    void f64_vec(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
    void finish_to(const std::string& path) {
        std::uint32_t crc = crc32(buf_.data(), buf_.size());
        u32(crc);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoFailure("cannot write " + path);
        out.write(reinterpret_cast<const char*>(buf_.data()),
                  static_cast<std::streamsize>(buf_.size()));
        if (!out) throw IoFailure("failed writing " + path);
    }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoFailure("cannot open " + path);
        buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        if (buf_.size() < 4) throw CorruptFile(path + ": truncated model file");
        std::size_t body = buf_.size() - 4;
        std::uint32_t stored = 0;
        for (int i = 0; i < 4; ++i) {
            stored |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf_[body + i])) << (8 * i);
        }
        if (crc32(reinterpret_cast<const std::uint8_t*>(buf_.data()), body) != stored) {
            throw CorruptFile(path + ": checksum mismatch");
        }
        end_ = body;
    }

    std::uint8_t u8() { return take(1)[0]; }
    std::uint16_t u16() { return static_cast<std::uint16_t>(gather(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(gather(4)); }
    std::uint64_t u64() { return gather(8); }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::vector<double> f64_vec() {
        std::uint64_t n = u64();
        if (n > (end_ - pos_) / 8) throw CorruptFile("model file: vector length overruns file");
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }
    bool done() const { return pos_ == end_; }

private:
    const std::uint8_t* take(std::size_t n) {
        if (pos_ + n > end_) throw CorruptFile("model file: unexpected end of data");
        const auto* p = reinterpret_cast<const std::uint8_t*>(buf_.data()) + pos_;
        pos_ += n;
        return p;
    }
    std::uint64_t gather(std::size_t n) {
        const std::uint8_t* p = take(n);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return v;
    }

    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
};

void write_header(Writer& w, ModelKind kind) {
    w.u8('M');
    w.u8('S');
    w.u8('E');
    w.u8('G');
    w.u16(kModelFormatVersion);
    w.u8(static_cast<std::uint8_t>(kind));
}

ModelKind read_header(Reader& r, const std::string& path) {
    char magic[4] = {static_cast<char>(r.u8()), static_cast<char>(r.u8()),
                     static_cast<char>(r.u8()), static_cast<char>(r.u8())};
    if (std::memcmp(magic, "MSEG", 4) != 0) throw CorruptFile(path + ": bad magic");
    std::uint16_t version = r.u16();
    if (version != kModelFormatVersion) {
        throw VersionMismatch(path + ": unsupported model format version " +
                              std::to_string(version));
    }
    std::uint8_t kind = r.u8();
    if (kind != static_cast<std::uint8_t>(ModelKind::Cnn) &&
        kind != static_cast<std::uint8_t>(ModelKind::RandomForest)) {
        throw VersionMismatch(path + ": unknown model kind tag " + std::to_string(kind));
    }
    return static_cast<ModelKind>(kind);
}

void write_pca(Writer& w, const PcaModel& pca) {
    w.u32(static_cast<std::uint32_t>(pca.n_components()));
    w.f64_vec(pca.mean);
    w.f64_vec(pca.explained_variance);
    for (const auto& comp : pca.components) w.f64_vec(comp);
}

PcaModel read_pca(Reader& r) {
    PcaModel pca;
    std::uint32_t k = r.u32();
    pca.mean = r.f64_vec();
    pca.explained_variance = r.f64_vec();
    for (std::uint32_t i = 0; i < k; ++i) pca.components.push_back(r.f64_vec());
    return pca;
}

}  // namespace

void model_save(const Cnn1dModel& model, const std::string& path) {
    Writer w;
    write_header(w, ModelKind::Cnn);
    w.u32(static_cast<std::uint32_t>(model.filters));
    w.u32(static_cast<std::uint32_t>(model.kernel_size));
    w.u32(static_cast<std::uint32_t>(model.input_len));
    w.u32(static_cast<std::uint32_t>(model.classes));
    w.f64_vec(model.conv_w);
    w.f64_vec(model.conv_b);
    w.f64_vec(model.dense_w);
    w.f64_vec(model.dense_b);
    w.finish_to(path);
}

void model_save(const RfBundle& bundle, const std::string& path) {
    Writer w;
    write_header(w, ModelKind::RandomForest);
    write_pca(w, bundle.pca);
    w.u32(static_cast<std::uint32_t>(bundle.forest.feature_dim));
    w.u32(static_cast<std::uint32_t>(bundle.forest.subset_size));
    w.u32(static_cast<std::uint32_t>(bundle.forest.trees.size()));
    for (const CenterSplitTree& tree : bundle.forest.trees) {
        w.u32(static_cast<std::uint32_t>(tree.nodes.size()));
        for (const CenterSplitNode& node : tree.nodes) {
            w.u8(node.leaf ? 1 : 0);
            if (node.leaf) {
                w.u32(static_cast<std::uint32_t>(node.leaf_class));
                continue;
            }
            w.u32(static_cast<std::uint32_t>(node.feature_subset.size()));
            for (std::size_t f : node.feature_subset) w.u32(static_cast<std::uint32_t>(f));
            w.u32(static_cast<std::uint32_t>(node.centers.size()));
            for (std::size_t i = 0; i < node.centers.size(); ++i) {
                w.u32(static_cast<std::uint32_t>(node.centers[i].cls));
                w.f64_vec(node.centers[i].center);
                w.u32(node.children[i]);
            }
        }
    }
    w.finish_to(path);
}

ModelKind peek_model_kind(const std::string& path) {
    Reader r(path);
    return read_header(r, path);
}

Cnn1dModel load_cnn(const std::string& path) {
    Reader r(path);
    if (read_header(r, path) != ModelKind::Cnn) {
        throw VersionMismatch(path + ": not a CNN model file");
    }
    Cnn1dModel m;
    m.filters = r.u32();
    m.kernel_size = r.u32();
    m.input_len = r.u32();
    m.classes = r.u32();
    m.conv_w = r.f64_vec();
    m.conv_b = r.f64_vec();
    m.dense_w = r.f64_vec();
    m.dense_b = r.f64_vec();
    if (m.conv_w.size() != m.filters * m.kernel_size || m.conv_b.size() != m.filters ||
        m.dense_w.size() != m.classes * m.filters || m.dense_b.size() != m.classes) {
        throw CorruptFile(path + ": parameter shapes disagree with header");
    }
    return m;
}

RfBundle load_rf(const std::string& path) {
    Reader r(path);
    if (read_header(r, path) != ModelKind::RandomForest) {
        throw VersionMismatch(path + ": not a random-forest model file");
    }
    RfBundle b;
    b.pca = read_pca(r);
    b.forest.feature_dim = r.u32();
    b.forest.subset_size = r.u32();
    std::uint32_t n_trees = r.u32();
    for (std::uint32_t t = 0; t < n_trees; ++t) {
        CenterSplitTree tree;
        std::uint32_t n_nodes = r.u32();
        for (std::uint32_t i = 0; i < n_nodes; ++i) {
            CenterSplitNode node;
            node.leaf = r.u8() != 0;
            if (node.leaf) {
                node.leaf_class = static_cast<int>(r.u32());
            } else {
                std::uint32_t fs = r.u32();
                for (std::uint32_t k = 0; k < fs; ++k) node.feature_subset.push_back(r.u32());
                std::uint32_t nc = r.u32();
                for (std::uint32_t k = 0; k < nc; ++k) {
                    ClassCenter cc;
                    cc.cls = static_cast<int>(r.u32());
                    cc.center = r.f64_vec();
                    node.centers.push_back(std::move(cc));
                    node.children.push_back(r.u32());
                }
            }
            tree.nodes.push_back(std::move(node));
        }
        for (const CenterSplitNode& node : tree.nodes) {
            for (std::uint32_t child : node.children) {
                if (child >= tree.nodes.size()) throw CorruptFile(path + ": bad child index");
            }
        }
        b.forest.trees.push_back(std::move(tree));
    }
    return b;
}

}  // namespace mseg
