#ifndef OSGOOD_IO_HPP
#define OSGOOD_IO_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "osgood/field.hpp"

namespace osgood {

// %.17g round-trips doubles exactly, so identical runs emit identical bytes.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw ConfigError("cannot open " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << format_double(values[i]);
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

// Field snapshot: row-major little-endian doubles in <base>.bin, metadata in
// <base>.json.
inline void write_field(const std::filesystem::path& base, const ScalarField2D& f, double time) {
    const Grid2D& g = f.grid();
    {
        std::ofstream bin(base.string() + ".bin", std::ios::binary);
        if (!bin) throw ConfigError("cannot open " + base.string() + ".bin");
        bin.write(reinterpret_cast<const char*>(f.data().data()),
                  static_cast<std::streamsize>(f.data().size() * sizeof(double)));
    }
    nlohmann::json header;
    header["N"] = g.n;
    header["domain"] = {{"origin", {g.origin.x, g.origin.y}},
                        {"extent", g.extent},
                        {"periodic", g.periodic}};
    header["time"] = time;
    header["layout"] = "row-major float64";
    std::ofstream js(base.string() + ".json");
    js << header.dump(2) << "\n";
}

inline ScalarField2D read_field(const std::filesystem::path& base) {
    std::ifstream js(base.string() + ".json");
    if (!js) throw ConfigError("cannot open " + base.string() + ".json");
    nlohmann::json header = nlohmann::json::parse(js);
    const int n = header.at("N").get<int>();
    const auto& dom = header.at("domain");
    Grid2D g = dom.at("periodic").get<bool>()
                   ? Grid2D::torus(n)
                   : Grid2D::box(n,
                                 {dom.at("origin")[0].get<double>(),
                                  dom.at("origin")[1].get<double>()},
                                 dom.at("extent").get<double>());
    ScalarField2D f(g);
    std::ifstream bin(base.string() + ".bin", std::ios::binary);
    if (!bin) throw ConfigError("cannot open " + base.string() + ".bin");
    bin.read(reinterpret_cast<char*>(f.data().data()),
             static_cast<std::streamsize>(f.data().size() * sizeof(double)));
    if (!bin) throw ConfigError("short read on " + base.string() + ".bin");
    return f;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

// FNV-1a, used for manifest content hashes.
inline std::string content_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace osgood

#endif  // OSGOOD_IO_HPP
