// SPDX-License-Identifier: Apache-2.0
//
// waveformlab — non-WSSUS doubly dispersive channels and waveform selection
// Copyright (c) 2026 the waveformlab authors
//
// Licensed under the Apache License, Version 2.0; you may not use this file
// except in compliance with the License. You may obtain a copy of the License
// at http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "waveformlab/chanmodel.hpp"
#include "waveformlab/operators.hpp"

namespace waveformlab::io {

// Shortest round-trip-safe decimal form of a double.
std::string format_double(double v);

// =========================================================================
// Realization records
// =========================================================================

// Flat per-ray view of a realization: the total normalized delay and Doppler
// together with the complex gain, tagged by region and cluster.
struct RayRecord {
    int region = 0;
    int cluster = 0;
    double l_tot = 0.0;
    double k_tot = 0.0;
    std::complex<double> gain;
};

std::vector<RayRecord> ray_records(const ChannelRealization &realization);

// Text form, one record per line:
//   region cluster l_tot k_tot re im
// Doubles are printed round-trip safe, so write/read/write is byte-stable.
void write_ray_records(std::ostream &out,
                       const std::vector<RayRecord> &records);
std::vector<RayRecord> read_ray_records(std::istream &in);

void save_ray_records(const std::string &path,
                      const std::vector<RayRecord> &records);
std::vector<RayRecord> load_ray_records(const std::string &path);

// =========================================================================
// Binary matrix dump
// =========================================================================

// Little-endian layout: u32 magic 'WLMX', u32 rows, u32 cols, u32 flags
// (16-byte header), then row-major interleaved (Re, Im) float64 entries.
void save_matrix(const std::string &path, const CMat &m);
CMat load_matrix(const std::string &path);

// =========================================================================
// CSV output
// =========================================================================

// Every CSV written through this class starts with a header row and ends
// with a trailing manifest reference comment.
class CsvWriter {
  public:
    CsvWriter(const std::string &path,
              const std::vector<std::string> &columns,
              std::string manifest_ref = "manifest.json");
    ~CsvWriter();

    CsvWriter(const CsvWriter &) = delete;
    CsvWriter &operator=(const CsvWriter &) = delete;

    void row(const std::vector<std::string> &cells);
    void row_values(const std::vector<double> &values);
    void close();

  private:
    std::ofstream out_;
    std::string manifest_ref_;
    std::size_t columns_ = 0;
    bool closed_ = false;
};

// =========================================================================
// Content hashes and run manifest
// =========================================================================

std::string sha1_hex(const void *data, std::size_t len);

// Hash of "blob <size>\0" + content, the content-addressed form used for
// the manifest entries.
std::string blob_sha1(const std::string &content);
std::string blob_sha1_file(const std::string &path);

struct Manifest {
    std::string tool = "waveformlab";
    std::string version = "0.1.0";
    std::uint64_t seed = 0;
    std::string config_hash;                    // blob hash of the config
    std::map<std::string, std::string> outputs; // path -> blob hash
};

// Deterministic JSON (sorted keys), so identical runs write identical bytes.
void write_manifest(const std::string &path, const Manifest &manifest);
Manifest read_manifest(const std::string &path);

} // namespace waveformlab::io
