#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gspcd/cda.hpp"
#include "gspcd/core.hpp"

namespace gspcd {

/// One-to-one pairing of detections and ground-truth targets.
struct MatchResult {
    struct Pair {
        std::string target_id;
        std::size_t detection_index;
        double distance_px;
    };
    std::vector<Pair> matched_pairs;
    std::vector<std::string> missed_targets;   // in target-list order
    std::vector<std::size_t> false_alarms;     // ascending detection index
};

/// Greedy nearest-first matching on centroid-to-target Euclidean pixel
/// distance. Pairs beyond radius_px are rejected; equal distances break
/// toward the lower target id, then the lower detection index.
inline MatchResult match(std::span<const Detection> detections,
                         std::span<const Target> targets, double radius_px) {
    if (!(radius_px > 0.0))
        throw ArgumentError("match: radius_px must be positive");

    struct Cand {
        double dist;
        std::size_t target_index;
        std::size_t detection_index;
    };
    std::vector<Cand> cands;
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        for (std::size_t di = 0; di < detections.size(); ++di) {
            const double dr = detections[di].centroid_row - targets[ti].row;
            const double dc = detections[di].centroid_col - targets[ti].col;
            const double d = std::sqrt(dr * dr + dc * dc);
            if (d <= radius_px) cands.push_back({d, ti, di});
        }
    }
    std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (targets[a.target_index].id != targets[b.target_index].id)
            return targets[a.target_index].id < targets[b.target_index].id;
        return a.detection_index < b.detection_index;
    });

    std::vector<bool> target_taken(targets.size(), false);
    std::vector<bool> detection_taken(detections.size(), false);
    MatchResult result;
    for (const Cand& c : cands) {
        if (target_taken[c.target_index] || detection_taken[c.detection_index])
            continue;
        target_taken[c.target_index] = true;
        detection_taken[c.detection_index] = true;
        result.matched_pairs.push_back(
            {targets[c.target_index].id, c.detection_index, c.dist});
    }
    for (std::size_t ti = 0; ti < targets.size(); ++ti)
        if (!target_taken[ti]) result.missed_targets.push_back(targets[ti].id);
    for (std::size_t di = 0; di < detections.size(); ++di)
        if (!detection_taken[di]) result.false_alarms.push_back(di);
    return result;
}

struct Score {
    double pd = 0.0;
    double far = 0.0;
};

/// pd = matched / known; far = false alarms per square kilometer.
inline Score score(const MatchResult& result, std::int64_t known_count,
                   double area_km2) {
    if (known_count <= 0)
        throw ArgumentError("score: known_count must be positive");
    if (!(area_km2 > 0.0))
        throw ArgumentError("score: area_km2 must be positive");
    Score s;
    s.pd = static_cast<double>(result.matched_pairs.size()) /
           static_cast<double>(known_count);
    s.far = static_cast<double>(result.false_alarms.size()) / area_km2;
    return s;
}

/// One row of a threshold sweep. lambda is the per-case threshold, averaged
/// arithmetically when a row aggregates several cases.
struct RocRow {
    double c_constant = 0.0;
    double lambda = 0.0;
    std::int64_t detected = 0;
    std::int64_t known = 0;
    double pd = 0.0;
    std::int64_t false_alarms = 0;
    double area_km2 = 0.0;
    double far = 0.0;
};

struct RocTable {
    std::vector<RocRow> rows;
};

/// Accumulates per-case match counts into per-C rows. Aggregation uses
/// integer counts only, so case order cannot change the result.
class RocAccumulator {
public:
    explicit RocAccumulator(std::span<const double> c_values)
        : c_values_(c_values.begin(), c_values.end()),
          known_(c_values.size(), 0),
          detected_(c_values.size(), 0),
          false_alarms_(c_values.size(), 0),
          lambda_sum_(c_values.size(), 0.0) {
        if (c_values_.empty())
            throw ArgumentError("RocAccumulator: empty C list");
    }

    void add_case(std::size_t c_index, double lambda, std::int64_t known,
                  std::int64_t detected, std::int64_t false_alarms) {
        known_.at(c_index) += known;
        detected_.at(c_index) += detected;
        false_alarms_.at(c_index) += false_alarms;
        lambda_sum_.at(c_index) += lambda;
        if (c_index == 0) ++cases_;
    }

    std::int64_t case_count() const { return cases_; }

    RocTable finish(double area_km2_total) const {
        if (!(area_km2_total > 0.0))
            throw ArgumentError("RocAccumulator: total area must be positive");
        if (cases_ == 0)
            throw ArgumentError("RocAccumulator: no cases accumulated");
        RocTable table;
        table.rows.reserve(c_values_.size());
        for (std::size_t i = 0; i < c_values_.size(); ++i) {
            RocRow row;
            row.c_constant = c_values_[i];
            row.lambda = lambda_sum_[i] / static_cast<double>(cases_);
            row.detected = detected_[i];
            row.known = known_[i];
            row.pd = known_[i] > 0
                         ? static_cast<double>(detected_[i]) /
                               static_cast<double>(known_[i])
                         : 0.0;
            row.false_alarms = false_alarms_[i];
            row.area_km2 = area_km2_total;
            row.far = static_cast<double>(false_alarms_[i]) / area_km2_total;
            table.rows.push_back(row);
        }
        return table;
    }

private:
    std::vector<double> c_values_;
    std::vector<std::int64_t> known_;
    std::vector<std::int64_t> detected_;
    std::vector<std::int64_t> false_alarms_;
    std::vector<double> lambda_sum_;
    std::int64_t cases_ = 0;
};

/// One surveillance/reference pair with its ground truth.
struct EvalCase {
    Image surveillance;
    Image reference;
    std::vector<Target> targets;
};

/// Sweeps C over every case, matching detections to targets and aggregating
/// counts per C. The table area is cases * area_km2_per_image.
inline RocTable roc_sweep(std::span<const EvalCase> cases,
                          std::span<const double> c_values,
                          const CdaParams& params, double radius_px,
                          double area_km2_per_image) {
    if (cases.empty()) throw ArgumentError("roc_sweep: no cases");
    if (c_values.empty()) throw ArgumentError("roc_sweep: no C values");
    if (!(area_km2_per_image > 0.0))
        throw ArgumentError("roc_sweep: area_km2_per_image must be positive");
    RocAccumulator acc(c_values);
    for (const EvalCase& ec : cases) {
        const auto points = detect_sweep(ec.surveillance, ec.reference, params,
                                         c_values);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const MatchResult mr = match(points[i].detections, ec.targets,
                                         radius_px);
            acc.add_case(i, points[i].threshold.lambda,
                         static_cast<std::int64_t>(ec.targets.size()),
                         static_cast<std::int64_t>(mr.matched_pairs.size()),
                         static_cast<std::int64_t>(mr.false_alarms.size()));
        }
    }
    return acc.finish(static_cast<double>(cases.size()) * area_km2_per_image);
}

}  // namespace gspcd
