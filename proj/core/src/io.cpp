// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "waveformlab/io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include <json.hpp>

namespace waveformlab::io {
namespace {

constexpr std::uint32_t kMatrixMagic = 0x584d4c57; // "WLMX" little-endian

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// =========================================================================
// Realization records
// =========================================================================

std::vector<RayRecord> ray_records(const ChannelRealization &realization) {
    std::vector<RayRecord> records;
    for (const StationarityRegion &region : realization.regions) {
        for (std::size_t c = 0; c < region.clusters.size(); ++c) {
            const Cluster &cluster = region.clusters[c];
            for (const Ray &ray : cluster.rays) {
                RayRecord rec;
                rec.region = region.index;
                rec.cluster = static_cast<int>(c);
                rec.l_tot = cluster.delay_norm_total + ray.delay_offset_norm;
                rec.k_tot = ray.doppler_norm_total;
                rec.gain = ray.gain;
                records.push_back(rec);
            }
        }
    }
    return records;
}

void write_ray_records(std::ostream &out,
                       const std::vector<RayRecord> &records) {
    out << "# region cluster l_tot k_tot re im\n";
    for (const RayRecord &r : records) {
        out << r.region << ' ' << r.cluster << ' ' << format_double(r.l_tot)
            << ' ' << format_double(r.k_tot) << ' '
            << format_double(r.gain.real()) << ' '
            << format_double(r.gain.imag()) << '\n';
    }
}

std::vector<RayRecord> read_ray_records(std::istream &in) {
    std::vector<RayRecord> records;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        RayRecord r;
        double re = 0.0;
        double im = 0.0;
        if (!(fields >> r.region >> r.cluster >> r.l_tot >> r.k_tot >> re >>
              im)) {
            throw std::runtime_error("ray record line " +
                                        std::to_string(number) +
                                        ": expected 6 fields");
        }
        r.gain = {re, im};
        records.push_back(r);
    }
    return records;
}

void save_ray_records(const std::string &path,
                      const std::vector<RayRecord> &records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file '" + path + "'");
    }
    write_ray_records(out, records);
}

std::vector<RayRecord> load_ray_records(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file '" + path + "'");
    }
    return read_ray_records(in);
}

// =========================================================================
// Binary matrix dump
// =========================================================================

void save_matrix(const std::string &path, const CMat &m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file '" + path + "'");
    }
    const std::uint32_t header[4] = {kMatrixMagic,
                                     static_cast<std::uint32_t>(m.rows()),
                                     static_cast<std::uint32_t>(m.cols()),
                                     0u};
    out.write(reinterpret_cast<const char *>(header), sizeof(header));
    std::vector<double> row(2 * static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row[2 * static_cast<std::size_t>(j)] = m(i, j).real();
            row[2 * static_cast<std::size_t>(j) + 1] = m(i, j).imag();
        }
        out.write(reinterpret_cast<const char *>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) {
        throw std::runtime_error("short write to '" + path + "'");
    }
}

CMat load_matrix(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file '" + path + "'");
    }
    std::uint32_t header[4] = {0, 0, 0, 0};
    in.read(reinterpret_cast<char *>(header), sizeof(header));
    if (!in || header[0] != kMatrixMagic) {
        throw std::runtime_error("'" + path +
                                 "' is not a waveformlab matrix dump");
    }
    const int rows = static_cast<int>(header[1]);
    const int cols = static_cast<int>(header[2]);
    CMat m(rows, cols);
    std::vector<double> row(2 * static_cast<std::size_t>(cols));
    for (int i = 0; i < rows; ++i) {
        in.read(reinterpret_cast<char *>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) {
            throw std::runtime_error("truncated matrix dump '" + path + "'");
        }
        for (int j = 0; j < cols; ++j) {
            m(i, j) = {row[2 * static_cast<std::size_t>(j)],
                       row[2 * static_cast<std::size_t>(j) + 1]};
        }
    }
    return m;
}

// =========================================================================
// CSV output
// =========================================================================

CsvWriter::CsvWriter(const std::string &path,
                     const std::vector<std::string> &columns,
                     std::string manifest_ref)
    : out_(path, std::ios::binary), manifest_ref_(std::move(manifest_ref)),
      columns_(columns.size()) {
    if (!out_) {
        throw std::runtime_error("cannot write file '" + path + "'");
    }
    if (columns.empty()) {
        throw std::invalid_argument("CSV needs at least one column");
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
        // Destructors must not throw; an incomplete trailer will surface
        // through the manifest hash check instead.
    }
}

void CsvWriter::row(const std::vector<std::string> &cells) {
    if (closed_) throw std::logic_error("CSV already closed");
    if (cells.size() != columns_) {
        throw std::invalid_argument("CSV row width does not match header");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void CsvWriter::row_values(const std::vector<double> &values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
}

void CsvWriter::close() {
    if (closed_) return;
    out_ << "# manifest: " << manifest_ref_ << '\n';
    out_.close();
    closed_ = true;
    if (out_.fail()) {
        throw std::runtime_error("failed to finalize CSV output");
    }
}

// =========================================================================
// Content hashes and run manifest
// =========================================================================

std::string sha1_hex(const void *data, std::size_t len) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    if (EVP_Digest(data, len, digest, &digest_len, EVP_sha1(), nullptr) != 1) {
        throw std::runtime_error("SHA-1 digest failed");
    }
    static const char *hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * digest_len);
    for (unsigned int i = 0; i < digest_len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string blob_sha1(const std::string &content) {
    std::string framed = "blob " + std::to_string(content.size());
    framed.push_back('\0');
    framed += content;
    return sha1_hex(framed.data(), framed.size());
}

std::string blob_sha1_file(const std::string &path) {
    return blob_sha1(read_file(path));
}

void write_manifest(const std::string &path, const Manifest &manifest) {
    nlohmann::json j;
    j["tool"] = manifest.tool;
    j["version"] = manifest.version;
    j["seed"] = manifest.seed;
    j["config_hash"] = manifest.config_hash;
    j["outputs"] = nlohmann::json::object();
    for (const auto &[file, hash] : manifest.outputs) {
        j["outputs"][file] = hash;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file '" + path + "'");
    }
    out << j.dump(2) << '\n';
}

Manifest read_manifest(const std::string &path) {
    const nlohmann::json j = nlohmann::json::parse(read_file(path));
    Manifest m;
    m.tool = j.value("tool", "");
    m.version = j.value("version", "");
    m.seed = j.value("seed", static_cast<std::uint64_t>(0));
    m.config_hash = j.value("config_hash", "");
    if (j.contains("outputs")) {
        for (const auto &[file, hash] : j.at("outputs").items()) {
            m.outputs[file] = hash.get<std::string>();
        }
    }
    return m;
}

} // namespace waveformlab::io
