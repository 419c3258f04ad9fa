#include "spx/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "spx/error.hpp"
#include "spx/rng.hpp"

namespace spx {

std::vector<SegmentRecord> segment_stats(const Segmentation& s, const LabelMap& l) {
    if (s.width != l.width || s.height != l.height)
        throw Error("segment_stats: segmentation and label map dimensions differ");
    l.validate();

    std::vector<int64_t> size(s.k_actual, 0), forest(s.k_actual, 0), defo(s.k_actual, 0);
    for (size_t i = 0; i < s.labels.size(); ++i) {
        const uint32_t seg = s.labels[i];
        if (seg == kInvalidSegment) continue;
        if (seg >= s.k_actual) throw Error("segment_stats: label out of range");
        ++size[seg];
        if (l.labels[i] == kLabelForest) ++forest[seg];
        else if (l.labels[i] == kLabelDeforestation) ++defo[seg];
    }

    std::vector<SegmentRecord> records(s.k_actual);
    for (uint32_t seg = 0; seg < s.k_actual; ++seg) {
        SegmentRecord& r = records[seg];
        r.segment_id = seg;
        r.pixel_count = size[seg];
        const int64_t labeled = forest[seg] + defo[seg];
        if (labeled == 0) {
            r.usable = false;
            continue;
        }
        r.forest_fraction = static_cast<double>(forest[seg]) / static_cast<double>(labeled);
        r.deforestation_fraction = static_cast<double>(defo[seg]) / static_cast<double>(labeled);
        if (r.deforestation_fraction > r.forest_fraction) {
            r.dominant_class = kLabelDeforestation;
            r.homogeneity = r.deforestation_fraction;
        } else {
            r.dominant_class = kLabelForest;
            r.homogeneity = r.forest_fraction;
        }
    }
    return records;
}

std::vector<SegmentRecord> filter_useful(const std::vector<SegmentRecord>& records,
                                         int64_t min_pixels, double min_homog) {
    if (min_homog < 0.5 || min_homog > 1.0)
        throw Error("filter_useful: min_homog must lie in [0.5, 1]");
    if (min_pixels < 0) throw Error("filter_useful: min_pixels must be >= 0");
    std::vector<SegmentRecord> out;
    for (const auto& r : records)
        if (r.usable && r.pixel_count > min_pixels && r.homogeneity > min_homog)
            out.push_back(r);
    return out;
}

namespace {

SegmentKey key_of(const SegmentRecord& r) { return {r.area_id, r.segment_id}; }

bool key_less(const SegmentRecord& a, const SegmentRecord& b) {
    return key_of(a) < key_of(b);
}

}  // namespace

SplitManifest build_training_set(const std::vector<SegmentRecord>& records, int n_pure,
                                 int n_mixed, uint64_t seed) {
    if (n_pure < 0 || n_mixed < 0) throw Error("build_training_set: negative quota");

    SplitManifest m;
    m.n_pure = n_pure;
    m.n_mixed = n_mixed;
    m.seed = seed;
    if (!records.empty()) m.method = records.front().method;

    std::vector<SegmentKey> train_keys;
    for (const uint8_t cls : {kLabelForest, kLabelDeforestation}) {
        std::vector<SegmentRecord> pure, mixed;
        for (const auto& r : records) {
            if (!r.usable || r.dominant_class != cls) continue;
            if (r.homogeneity == 1.0) pure.push_back(r);
            else mixed.push_back(r);
        }
        const char* cls_name = cls == kLabelForest ? "forest" : "deforestation";
        if (static_cast<int>(pure.size()) < n_pure)
            throw Error(std::string("build_training_set: class ") + cls_name + " has " +
                        std::to_string(pure.size()) + " pure segments, need " +
                        std::to_string(n_pure) + " (deficit " +
                        std::to_string(n_pure - static_cast<int>(pure.size())) + ")");
        if (static_cast<int>(mixed.size()) < n_mixed)
            throw Error(std::string("build_training_set: class ") + cls_name + " has " +
                        std::to_string(mixed.size()) + " mixed segments, need " +
                        std::to_string(n_mixed) + " (deficit " +
                        std::to_string(n_mixed - static_cast<int>(mixed.size())) + ")");

        // Pure stratum: seeded uniform draw over a canonically ordered pool.
        std::sort(pure.begin(), pure.end(), key_less);
        Rng rng(derive_seed(seed, cls));
        shuffle(pure, rng);
        pure.resize(n_pure);

        // Mixed stratum: the lowest homogeneity survivors, ascending.
        std::sort(mixed.begin(), mixed.end(), [](const SegmentRecord& a, const SegmentRecord& b) {
            if (a.homogeneity != b.homogeneity) return a.homogeneity < b.homogeneity;
            if (a.pixel_count != b.pixel_count) return a.pixel_count > b.pixel_count;
            return key_of(a) < key_of(b);
        });
        mixed.resize(n_mixed);

        auto& dst = cls == kLabelForest ? m.train_forest : m.train_deforestation;
        for (const auto& r : pure) dst.push_back(key_of(r));
        for (const auto& r : mixed) dst.push_back(key_of(r));
        std::sort(dst.begin(), dst.end());
        train_keys.insert(train_keys.end(), dst.begin(), dst.end());
    }

    std::sort(train_keys.begin(), train_keys.end());
    for (const auto& r : records) {
        if (!r.usable) continue;
        if (!std::binary_search(train_keys.begin(), train_keys.end(), key_of(r)))
            m.test_ids.push_back(key_of(r));
    }
    std::sort(m.test_ids.begin(), m.test_ids.end());
    return m;
}

void save_manifest(const std::string& path, const SplitManifest& m) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write manifest: " + path);
    f << "# split manifest\n"
      << "# method=" << m.method << "\n"
      << "# min_pixels=" << m.min_pixels << "\n"
      << "# min_homog=" << m.min_homog << "\n"
      << "# n_pure=" << m.n_pure << "\n"
      << "# n_mixed=" << m.n_mixed << "\n"
      << "# seed=" << m.seed << "\n"
      << "# train_forest=" << m.train_forest.size()
      << " train_deforestation=" << m.train_deforestation.size()
      << " test=" << m.test_ids.size() << "\n"
      << "role,area_id,segment_id\n";
    auto dump = [&](const char* role, const std::vector<SegmentKey>& keys) {
        for (const auto& k : keys)
            f << role << "," << k.area_id << "," << k.segment_id << "\n";
    };
    dump("train_forest", m.train_forest);
    dump("train_deforestation", m.train_deforestation);
    dump("test", m.test_ids);
}

SplitManifest load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open manifest: " + path);
    SplitManifest m;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const auto sp = line.find(' ', 2);
            const std::string key = line.substr(2, eq - 2);
            std::string value = line.substr(eq + 1);
            if (const auto cut = value.find(' '); cut != std::string::npos) value = value.substr(0, cut);
            if (key == "method") m.method = value;
            else if (key == "min_pixels") m.min_pixels = std::stoll(value);
            else if (key == "min_homog") m.min_homog = std::stod(value);
            else if (key == "n_pure") m.n_pure = std::stoi(value);
            else if (key == "n_mixed") m.n_mixed = std::stoi(value);
            else if (key == "seed") m.seed = std::stoull(value);
            (void)sp;
            continue;
        }
        if (line.rfind("role,", 0) == 0) continue;
        std::stringstream ss(line);
        std::string role, area, seg;
        std::getline(ss, role, ',');
        std::getline(ss, area, ',');
        std::getline(ss, seg, ',');
        const SegmentKey k{std::stoi(area), static_cast<uint32_t>(std::stoul(seg))};
        if (role == "train_forest") m.train_forest.push_back(k);
        else if (role == "train_deforestation") m.train_deforestation.push_back(k);
        else if (role == "test") m.test_ids.push_back(k);
        else throw Error("manifest: unknown role " + role + " in " + path);
    }
    return m;
}

MatchResult match_segments(const Segmentation& ref, const Segmentation& other,
                           const std::vector<uint32_t>& ids) {
    if (ref.width != other.width || ref.height != other.height)
        throw Error("match_segments: dimensions differ");
    for (size_t i = 0; i < ref.labels.size(); ++i)
        if ((ref.labels[i] == kInvalidSegment) != (other.labels[i] == kInvalidSegment))
            throw Error("match_segments: masks differ at pixel " + std::to_string(i));
    for (const uint32_t id : ids)
        if (id >= ref.k_actual) throw Error("match_segments: ref id out of range");

    std::vector<int64_t> other_size(other.k_actual, 0);
    for (const uint32_t l : other.labels)
        if (l != kInvalidSegment) ++other_size[l];

    // Overlap counts, keyed (ref id << 32 | other id).
    std::unordered_map<uint64_t, int64_t> overlap;
    for (size_t i = 0; i < ref.labels.size(); ++i) {
        if (ref.labels[i] == kInvalidSegment) continue;
        const uint64_t key = (static_cast<uint64_t>(ref.labels[i]) << 32) | other.labels[i];
        ++overlap[key];
    }
    std::vector<std::vector<std::pair<uint32_t, int64_t>>> by_ref(ref.k_actual);
    for (const auto& [key, count] : overlap)
        by_ref[key >> 32].emplace_back(static_cast<uint32_t>(key & 0xFFFFFFFFu), count);
    for (auto& v : by_ref) std::sort(v.begin(), v.end());

    MatchResult res;
    res.ref_ids = ids;
    std::unordered_map<uint32_t, int> seen;
    for (const uint32_t id : ids) {
        uint32_t best = kInvalidSegment;
        int64_t best_count = 0;
        for (const auto& [o, count] : by_ref[id]) {
            const bool better =
                count > best_count ||
                (count == best_count && best != kInvalidSegment &&
                 (other_size[o] > other_size[best] ||
                  (other_size[o] == other_size[best] && o < best)));
            if (better) {
                best = o;
                best_count = count;
            }
        }
        res.matched.push_back(best);
        res.overlap.push_back(best_count);
        if (best != kInvalidSegment && ++seen[best] > 1) res.injective = false;
    }
    return res;
}

}  // namespace spx
