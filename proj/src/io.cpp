#include "pshenv/io.hpp"

#include "pshenv/error.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pshenv::io {

namespace {

static_assert(std::endian::native == std::endian::little, "field files are little-endian");

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
    std::filesystem::path p = stem;
    p += ext;
    return p;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError("cannot open " + file.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void dump(const std::filesystem::path& file, const std::string& bytes) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + file.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("short write to " + file.string());
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: EVP_Digest failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string sha256_file(const std::filesystem::path& file) { return sha256_hex(slurp(file)); }

std::string write_text(const std::filesystem::path& file, const std::string& text) {
    dump(file, text);
    return sha256_hex(text);
}

std::string write_field(const std::filesystem::path& stem, const Field& u) {
    const ProductGrid& g = u.grid();
    std::string bytes(u.size() * sizeof(double), '\0');
    std::memcpy(bytes.data(), u.values().data(), bytes.size());
    const nlohmann::json header = {{"nx1", g.nx1()},
                                   {"nx2", g.nx2()},
                                   {"nt", g.nt},
                                   {"h1", g.torus.h1()},
                                   {"h2", g.torus.h2()},
                                   {"ht", g.ht()},
                                   {"offset", g.torus.offset},
                                   {"axis_order", "x1,x2,t"},
                                   {"dtype", "float64-le"},
                                   {"count", u.size()},
                                   {"data", with_ext(stem, ".bin").filename().string()}};
    dump(with_ext(stem, ".json"), header.dump(2) + "\n");
    dump(with_ext(stem, ".bin"), bytes);
    return sha256_hex(bytes);
}

Field read_field(const std::filesystem::path& stem) {
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(slurp(with_ext(stem, ".json")));
    } catch (const nlohmann::json::exception& e) {
        throw InputError("read_field: bad header: " + std::string(e.what()));
    }
    if (h.value("dtype", "") != "float64-le" || h.value("axis_order", "") != "x1,x2,t") {
        throw InputError("read_field: unsupported layout in " + with_ext(stem, ".json").string());
    }
    const ProductGrid g = build_grid(h.at("nx1").get<int>(), h.at("nx2").get<int>(), h.at("nt").get<int>(),
                                     h.at("offset").get<bool>());
    const std::string bytes = slurp(with_ext(stem, ".bin"));
    if (bytes.size() != g.size() * sizeof(double)) {
        throw InputError("read_field: " + with_ext(stem, ".bin").string() + " has the wrong size");
    }
    std::vector<double> v(g.size());
    std::memcpy(v.data(), bytes.data(), bytes.size());
    return Field(g, std::move(v));
}

void write_field_csv(const std::filesystem::path& file, const Field& u) {
    const ProductGrid& g = u.grid();
    std::ostringstream os;
    os.precision(17);
    os << "x1,x2,t,value\n";
    for (int k = 0; k < g.nt; ++k) {
        for (int i2 = 0; i2 < g.nx2(); ++i2) {
            for (int i1 = 0; i1 < g.nx1(); ++i1) {
                os << g.torus.x1(i1) << ',' << g.torus.x2(i2) << ',' << g.t(k) << ',' << u(i1, i2, k) << '\n';
            }
        }
    }
    dump(file, os.str());
}

}  // namespace pshenv::io
