#include "dpikit/dataset.hpp"

#include "dpikit/csv.hpp"
#include "dpikit/errors.hpp"
#include "dpikit/rng.hpp"
#include "dpikit/tokenizer.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace dpikit {

namespace {

std::string format_timestamp(double ts) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", ts);
    return buf;
}

double parse_double(const std::string& s, const char* what, size_t line_no) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("invalid ") + what + ": " + s, line_no);
    }
}

uint16_t parse_port(const std::string& s, size_t line_no) {
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size() || v < 0 || v > 65535) throw std::invalid_argument(s);
        return static_cast<uint16_t>(v);
    } catch (const std::exception&) {
        throw FormatError("invalid port: " + s, line_no);
    }
}

int32_t parse_label(const std::string& s, size_t line_no) {
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size() || v < 0) throw std::invalid_argument(s);
        return static_cast<int32_t>(v);
    } catch (const std::exception&) {
        throw FormatError("invalid label: " + s, line_no);
    }
}

// Orientation-insensitive key so window lookup does not scan every window.
struct EndpointKey {
    std::string bytes;

    static EndpointKey of(const FiveTuple& t) {
        auto endpoint = [](const IpAddr& ip, uint16_t port) {
            std::string e(ip.bytes.begin(), ip.bytes.end());
            e.push_back(static_cast<char>(ip.version));
            e.push_back(static_cast<char>(port >> 8));
            e.push_back(static_cast<char>(port & 0xff));
            return e;
        };
        std::string a = endpoint(t.src_ip, t.src_port);
        std::string b = endpoint(t.dst_ip, t.dst_port);
        if (b < a) std::swap(a, b);
        EndpointKey key;
        key.bytes = a + b;
        key.bytes.push_back(static_cast<char>(t.protocol));
        return key;
    }

    bool operator==(const EndpointKey&) const = default;
};

struct EndpointKeyHash {
    size_t operator()(const EndpointKey& k) const { return std::hash<std::string>{}(k.bytes); }
};

} // namespace

const char* to_string(DatasetMode m) {
    return m == DatasetMode::binary ? "binary" : "multiclass";
}

DatasetMode dataset_mode_from_string(const std::string& s) {
    if (s == "binary") return DatasetMode::binary;
    if (s == "multiclass") return DatasetMode::multiclass;
    throw Error("unknown dataset mode: " + s);
}

std::string DatasetManifest::to_json_string() const {
    nlohmann::ordered_json j;
    j["mode"] = to_string(mode);
    j["class_names"] = class_names;
    j["counts_per_class"] = counts_per_class;
    j["seed"] = seed;
    j["source_files"] = source_files;
    j["dedup"] = dedup;
    j["time_slack_seconds"] = time_slack_seconds;
    return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("invalid manifest JSON: ") + e.what(), 1);
    }
    try {
        DatasetManifest m;
        m.mode = dataset_mode_from_string(j.at("mode").get<std::string>());
        m.class_names = j.at("class_names").get<std::vector<std::string>>();
        m.counts_per_class = j.at("counts_per_class").get<std::vector<int64_t>>();
        m.seed = j.at("seed").get<uint64_t>();
        m.source_files = j.at("source_files").get<std::vector<std::string>>();
        m.dedup = j.at("dedup").get<bool>();
        m.time_slack_seconds = j.at("time_slack_seconds").get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("invalid manifest: ") + e.what(), 1);
    }
}

std::vector<PayloadRecord> dedup_payloads(const std::vector<PayloadRecord>& records) {
    std::vector<PayloadRecord> out;
    std::unordered_set<std::string> seen;
    seen.reserve(records.size() * 2);
    for (const PayloadRecord& rec : records) {
        std::string key(rec.payload.begin(), rec.payload.end());
        if (seen.insert(std::move(key)).second) out.push_back(rec);
    }
    return out;
}

std::vector<LabeledRecord> label_records(const std::vector<PayloadRecord>& records,
                                         const std::vector<AttackWindow>& windows, double slack) {
    if (slack < 0) throw Error("slack must be nonnegative");

    std::unordered_map<EndpointKey, std::vector<size_t>, EndpointKeyHash> index;
    index.reserve(windows.size() * 2);
    for (size_t i = 0; i < windows.size(); ++i) {
        index[EndpointKey::of(windows[i].five_tuple)].push_back(i);
    }

    std::vector<LabeledRecord> out;
    out.reserve(records.size());
    for (const PayloadRecord& rec : records) {
        const AttackWindow* best = nullptr;
        const auto it = index.find(EndpointKey::of(rec.five_tuple));
        if (it != index.end()) {
            for (size_t wi : it->second) {
                const AttackWindow& w = windows[wi];
                const bool tuple_match = rec.five_tuple == w.five_tuple ||
                                         rec.five_tuple == w.five_tuple.reversed();
                if (!tuple_match) continue;
                if (rec.timestamp < w.start_time - slack || rec.timestamp > w.end_time + slack) continue;
                if (!best || w.start_time < best->start_time) best = &w;
            }
        }
        LabeledRecord lr;
        lr.payload = rec.payload;
        if (best) {
            lr.label = 1;
            lr.attack_name = best->attack_name;
        }
        out.push_back(std::move(lr));
    }
    return out;
}

std::vector<LabeledRecord> balance_binary(const std::vector<LabeledRecord>& labeled, uint64_t seed) {
    std::vector<size_t> malicious, benign;
    for (size_t i = 0; i < labeled.size(); ++i) {
        (labeled[i].label == 0 ? benign : malicious).push_back(i);
    }
    if (malicious.empty()) throw Error("cannot balance: no malicious records");
    if (benign.size() < malicious.size()) {
        throw InsufficientBenignError(benign.size(), malicious.size());
    }

    SplitMix64 rng(seed);
    rng.shuffle(benign);
    benign.resize(malicious.size());

    std::vector<size_t> keep = std::move(malicious);
    keep.insert(keep.end(), benign.begin(), benign.end());
    rng.shuffle(keep);

    std::vector<LabeledRecord> out;
    out.reserve(keep.size());
    for (size_t i : keep) out.push_back(labeled[i]);
    return out;
}

std::pair<std::vector<LabeledRecord>, DatasetManifest>
build_multiclass(const std::vector<LabeledRecord>& labeled, const std::vector<std::string>& classes,
                 uint64_t seed) {
    if (classes.empty()) throw Error("multiclass requires at least one class");

    std::map<std::string, int32_t> class_index;
    for (size_t i = 0; i < classes.size(); ++i) {
        class_index[classes[i]] = static_cast<int32_t>(i);
    }

    std::vector<std::vector<size_t>> per_class(classes.size());
    for (size_t i = 0; i < labeled.size(); ++i) {
        const auto it = class_index.find(labeled[i].attack_name);
        if (it != class_index.end()) per_class[static_cast<size_t>(it->second)].push_back(i);
    }
    for (size_t c = 0; c < classes.size(); ++c) {
        if (per_class[c].empty()) throw UnknownClassError(classes[c]);
    }

    size_t min_count = per_class[0].size();
    for (const auto& v : per_class) min_count = std::min(min_count, v.size());

    SplitMix64 rng(seed);
    std::vector<size_t> keep;
    std::vector<int32_t> keep_labels;
    for (size_t c = 0; c < classes.size(); ++c) {
        auto indices = per_class[c];
        rng.shuffle(indices);
        indices.resize(min_count);
        for (size_t i : indices) {
            keep.push_back(i);
            keep_labels.push_back(static_cast<int32_t>(c));
        }
    }
    // One joint permutation keeps records and relabeled classes aligned.
    std::vector<size_t> order(keep.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    std::vector<LabeledRecord> out;
    out.reserve(keep.size());
    for (size_t pos : order) {
        LabeledRecord lr = labeled[keep[pos]];
        lr.label = keep_labels[pos];
        out.push_back(std::move(lr));
    }

    DatasetManifest manifest;
    manifest.mode = DatasetMode::multiclass;
    manifest.class_names = classes;
    manifest.counts_per_class.assign(classes.size(), static_cast<int64_t>(min_count));
    manifest.seed = seed;
    return {std::move(out), std::move(manifest)};
}

SplitResult split_dataset(const std::vector<LabeledRecord>& dataset, uint64_t seed) {
    if (dataset.size() < 10) throw TooSmallError(dataset.size());

    std::map<int32_t, std::vector<size_t>> per_class;
    for (size_t i = 0; i < dataset.size(); ++i) per_class[dataset[i].label].push_back(i);

    SplitMix64 rng(seed);
    SplitResult result;
    for (auto& [label, indices] : per_class) {
        rng.shuffle(indices);
        const size_t n = indices.size();

        // Largest-remainder apportionment of 70/20/10 (ties favor the larger
        // share), which keeps every part within one record of exact.
        const double exact[3] = {0.7 * n, 0.2 * n, 0.1 * n};
        size_t sizes[3];
        double fracs[3];
        size_t assigned = 0;
        for (int p = 0; p < 3; ++p) {
            sizes[p] = static_cast<size_t>(exact[p]);
            fracs[p] = exact[p] - static_cast<double>(sizes[p]);
            assigned += sizes[p];
        }
        size_t leftover = n - assigned;
        while (leftover > 0) {
            int best = 0;
            for (int p = 1; p < 3; ++p) {
                if (fracs[p] > fracs[best]) best = p;
            }
            ++sizes[best];
            fracs[best] = -1.0;
            --leftover;
        }

        size_t at = 0;
        auto take = [&](std::vector<LabeledRecord>& dst, size_t count) {
            for (size_t i = 0; i < count; ++i) dst.push_back(dataset[indices[at++]]);
        };
        take(result.train, sizes[0]);
        take(result.test, sizes[1]);
        take(result.validation, sizes[2]);
    }
    return result;
}

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension();
    p += ".manifest.json";
    return p;
}

void write_dataset(const std::vector<LabeledRecord>& records, const DatasetManifest& manifest,
                   const std::filesystem::path& csv_path) {
    std::ostringstream out;
    out << "label,attack_name,payload_hex\n";
    for (const LabeledRecord& rec : records) {
        out << rec.label << ',' << csv_escape(rec.attack_name) << ','
            << bytes_to_hex(rec.payload) << '\n';
    }
    atomic_write_file(csv_path, out.str());
    atomic_write_file(manifest_path_for(csv_path), manifest.to_json_string());
}

std::pair<std::vector<LabeledRecord>, DatasetManifest>
read_dataset(const std::filesystem::path& csv_path) {
    const CsvFile file = read_csv(csv_path);
    const auto cols = file.column_map({"label", "attack_name", "payload_hex"});

    std::vector<LabeledRecord> records;
    records.reserve(file.rows.size());
    for (size_t r = 0; r < file.rows.size(); ++r) {
        const size_t line_no = r + 2;
        const auto& row = file.rows[r];
        if (row.size() != 3) throw FormatError("expected 3 fields", line_no);
        LabeledRecord rec;
        rec.label = parse_label(row[cols[0]], line_no);
        rec.attack_name = row[cols[1]];
        try {
            rec.payload = hex_to_bytes(row[cols[2]]);
        } catch (const Error& e) {
            throw FormatError(std::string("payload_hex: ") + e.what(), line_no);
        }
        if (rec.payload.empty()) throw FormatError("empty payload", line_no);
        records.push_back(std::move(rec));
    }

    const DatasetManifest manifest =
        DatasetManifest::from_json_string(read_file(manifest_path_for(csv_path)));
    return {std::move(records), manifest};
}

void write_payload_records_csv(const std::vector<PayloadRecord>& records,
                               const std::filesystem::path& path) {
    std::ostringstream out;
    out << "src_ip,dst_ip,src_port,dst_port,protocol,timestamp,payload_hex\n";
    for (const PayloadRecord& rec : records) {
        out << rec.five_tuple.src_ip.to_string() << ',' << rec.five_tuple.dst_ip.to_string() << ','
            << rec.five_tuple.src_port << ',' << rec.five_tuple.dst_port << ','
            << to_string(rec.five_tuple.protocol) << ',' << format_timestamp(rec.timestamp) << ','
            << bytes_to_hex(rec.payload) << '\n';
    }
    atomic_write_file(path, out.str());
}

std::vector<PayloadRecord> read_payload_records_csv(const std::filesystem::path& path) {
    const CsvFile file = read_csv(path);
    const auto cols = file.column_map(
        {"src_ip", "dst_ip", "src_port", "dst_port", "protocol", "timestamp", "payload_hex"});

    std::vector<PayloadRecord> records;
    records.reserve(file.rows.size());
    for (size_t r = 0; r < file.rows.size(); ++r) {
        const size_t line_no = r + 2;
        const auto& row = file.rows[r];
        if (row.size() != 7) throw FormatError("expected 7 fields", line_no);
        PayloadRecord rec;
        try {
            rec.five_tuple.src_ip = IpAddr::parse(row[cols[0]]);
            rec.five_tuple.dst_ip = IpAddr::parse(row[cols[1]]);
            rec.five_tuple.protocol = protocol_from_string(row[cols[4]]);
            rec.payload = hex_to_bytes(row[cols[6]]);
        } catch (const FormatError&) {
            throw;
        } catch (const Error& e) {
            throw FormatError(e.what(), line_no);
        }
        rec.five_tuple.src_port = parse_port(row[cols[2]], line_no);
        rec.five_tuple.dst_port = parse_port(row[cols[3]], line_no);
        rec.timestamp = parse_double(row[cols[5]], "timestamp", line_no);
        if (rec.five_tuple.src_ip.version != rec.five_tuple.dst_ip.version) {
            throw FormatError("mixed IP versions in five-tuple", line_no);
        }
        if (rec.payload.empty()) throw FormatError("empty payload", line_no);
        if (rec.payload.size() > 65535) throw FormatError("payload exceeds 65535 bytes", line_no);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<AttackWindow> read_ground_truth_csv(const std::filesystem::path& path) {
    const CsvFile file = read_csv(path);
    const auto cols = file.column_map(
        {"src_ip", "dst_ip", "src_port", "dst_port", "protocol", "start_time", "end_time", "attack_name"});

    std::vector<AttackWindow> windows;
    windows.reserve(file.rows.size());
    for (size_t r = 0; r < file.rows.size(); ++r) {
        const size_t line_no = r + 2;
        const auto& row = file.rows[r];
        if (row.size() != 8) throw FormatError("expected 8 fields", line_no);
        AttackWindow w;
        try {
            w.five_tuple.src_ip = IpAddr::parse(row[cols[0]]);
            w.five_tuple.dst_ip = IpAddr::parse(row[cols[1]]);
            w.five_tuple.protocol = protocol_from_string(row[cols[4]]);
        } catch (const Error& e) {
            throw FormatError(e.what(), line_no);
        }
        w.five_tuple.src_port = parse_port(row[cols[2]], line_no);
        w.five_tuple.dst_port = parse_port(row[cols[3]], line_no);
        w.start_time = parse_double(row[cols[5]], "start_time", line_no);
        w.end_time = parse_double(row[cols[6]], "end_time", line_no);
        w.attack_name = row[cols[7]];
        if (w.attack_name.empty()) throw FormatError("empty attack_name", line_no);
        if (w.start_time > w.end_time) throw FormatError("start_time after end_time", line_no);
        windows.push_back(std::move(w));
    }
    return windows;
}

void write_ground_truth_csv(const std::vector<AttackWindow>& windows,
                            const std::filesystem::path& path) {
    std::ostringstream out;
    out << "src_ip,dst_ip,src_port,dst_port,protocol,start_time,end_time,attack_name\n";
    for (const AttackWindow& w : windows) {
        out << w.five_tuple.src_ip.to_string() << ',' << w.five_tuple.dst_ip.to_string() << ','
            << w.five_tuple.src_port << ',' << w.five_tuple.dst_port << ','
            << to_string(w.five_tuple.protocol) << ',' << format_timestamp(w.start_time) << ','
            << format_timestamp(w.end_time) << ',' << csv_escape(w.attack_name) << '\n';
    }
    atomic_write_file(path, out.str());
}

} // namespace dpikit
