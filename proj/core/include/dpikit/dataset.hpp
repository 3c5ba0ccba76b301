#pragma once

#include "dpikit/net.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dpikit {

// One ground-truth row: a five-tuple pattern plus a time interval naming the
// attack that produced matching traffic.
struct AttackWindow {
    FiveTuple five_tuple;
    double start_time = 0.0; // unix seconds
    double end_time = 0.0;
    std::string attack_name;
};

struct LabeledRecord {
    std::vector<uint8_t> payload;
    int32_t label = 0;
    std::string attack_name; // empty = none (benign)

    bool operator==(const LabeledRecord&) const = default;
};

enum class DatasetMode { binary, multiclass };

const char* to_string(DatasetMode m);
DatasetMode dataset_mode_from_string(const std::string& s);

struct DatasetManifest {
    DatasetMode mode = DatasetMode::binary;
    std::vector<std::string> class_names;
    std::vector<int64_t> counts_per_class;
    uint64_t seed = 0;
    std::vector<std::string> source_files;
    bool dedup = true;
    double time_slack_seconds = 1.0;

    std::string to_json_string() const;
    static DatasetManifest from_json_string(const std::string& text);

    bool operator==(const DatasetManifest&) const = default;
};

// Keeps the first occurrence of each exact payload byte sequence, comparing
// payload bytes only.
std::vector<PayloadRecord> dedup_payloads(const std::vector<PayloadRecord>& records);

// A record is malicious iff some window matches its five-tuple directionally
// or with the endpoints swapped, same protocol, and its timestamp lies within
// [start - slack, end + slack]. Overlaps resolve to the window with the
// smallest start_time (first in input order on ties).
std::vector<LabeledRecord> label_records(const std::vector<PayloadRecord>& records,
                                         const std::vector<AttackWindow>& windows, double slack);

// Keeps every malicious record and a seeded uniform sample (without
// replacement) of benign records of the same count, then shuffles.
std::vector<LabeledRecord> balance_binary(const std::vector<LabeledRecord>& labeled, uint64_t seed);

// Restricts to the given attack classes, relabels to 0..K-1 in the given
// order, and downsamples every class to the minimum class count.
std::pair<std::vector<LabeledRecord>, DatasetManifest>
build_multiclass(const std::vector<LabeledRecord>& labeled, const std::vector<std::string>& classes,
                 uint64_t seed);

struct SplitResult {
    std::vector<LabeledRecord> train;
    std::vector<LabeledRecord> test;
    std::vector<LabeledRecord> validation;
};

// Stratified 70/20/10 split: a seeded shuffle within each class, then a
// largest-remainder partition so every part is within one record of its exact
// per-class proportion.
SplitResult split_dataset(const std::vector<LabeledRecord>& dataset, uint64_t seed);

// Dataset files are CSV (label, attack_name, payload_hex) with a sibling
// "<stem>.manifest.json". Round trip is exact.
void write_dataset(const std::vector<LabeledRecord>& records, const DatasetManifest& manifest,
                   const std::filesystem::path& csv_path);
std::pair<std::vector<LabeledRecord>, DatasetManifest>
read_dataset(const std::filesystem::path& csv_path);

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path);

// Extraction output: CSV with columns
// src_ip, dst_ip, src_port, dst_port, protocol, timestamp, payload_hex.
void write_payload_records_csv(const std::vector<PayloadRecord>& records,
                               const std::filesystem::path& path);
std::vector<PayloadRecord> read_payload_records_csv(const std::filesystem::path& path);

// Ground truth: CSV with columns
// src_ip, dst_ip, src_port, dst_port, protocol, start_time, end_time, attack_name.
std::vector<AttackWindow> read_ground_truth_csv(const std::filesystem::path& path);
void write_ground_truth_csv(const std::vector<AttackWindow>& windows,
                            const std::filesystem::path& path);

} // namespace dpikit
