#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tailrisk/errors.hpp"
#include "tailrisk/sample_set.hpp"

namespace tailrisk::cli {

// All numeric output goes through one shortest-round-trip formatter so that
// repeated runs are byte-identical.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void print_kv(const std::string& key, double value) {
    std::printf("%s=%s\n", key.c_str(), fmt(value).c_str());
}

inline void print_kv(const std::string& key, const std::string& value) {
    std::printf("%s=%s\n", key.c_str(), value.c_str());
}

// Single-column sample CSV: one header row, one value per line.
inline SampleSet read_samples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open input file: " + path);
    SampleSet out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;  // header
        }
        try {
            out.values.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw ParameterError("malformed numeric row in " + path + ": " + line);
        }
    }
    if (out.empty()) throw SampleError("input file has no data rows: " + path);
    return out;
}

// Rectangular numeric CSV with one header row.
inline std::vector<std::vector<double>> read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open input file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParameterError("malformed numeric cell in " + path + ": " + cell);
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParameterError("ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw SampleError("input file has no data rows: " + path);
    return rows;
}

// Write-to-temp then rename, so no partial output survives an error.
class AtomicWriter {
public:
    explicit AtomicWriter(std::string path)
        : path_(std::move(path)), tmp_(path_ + ".tmp"), out_(tmp_) {
        if (!out_) throw ParameterError("cannot open output file: " + tmp_);
    }

    std::ofstream& stream() { return out_; }

    void commit() {
        out_.flush();
        if (!out_) throw Error("write failed for " + tmp_);
        out_.close();
        std::filesystem::rename(tmp_, path_);
    }

    ~AtomicWriter() {
        if (out_.is_open()) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

private:
    std::string path_;
    std::string tmp_;
    std::ofstream out_;
};

inline void write_samples_csv(const std::string& path, const std::string& header,
                              const std::vector<double>& values) {
    AtomicWriter w(path);
    w.stream() << header << "\n";
    for (double v : values) w.stream() << fmt(v) << "\n";
    w.commit();
}

}  // namespace tailrisk::cli
