#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace latgap {

// Fixed float formatting keeps reruns byte-identical.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

class CsvWriter {
public:
    CsvWriter(std::string path, std::vector<std::string> header, std::string config_hash)
        : path_(std::move(path)), hash_(std::move(config_hash)) {
        header.push_back("config_hash");
        rows_.emplace_back();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) rows_.back() += ',';
            rows_.back() += header[i];
        }
        ncols_ = header.size();
    }

    void row(const std::vector<std::string>& cells) {
        std::string r;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) r += ',';
            r += cells[i];
        }
        r += ',';
        r += hash_;
        rows_.push_back(std::move(r));
    }

    void flush() const {
        std::ofstream f(path_, std::ios::binary);
        for (const auto& r : rows_) f << r << '\n';
    }

private:
    std::string path_;
    std::string hash_;
    std::vector<std::string> rows_;
    std::size_t ncols_ = 0;
};

}  // namespace latgap
