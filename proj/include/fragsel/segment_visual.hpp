#pragma once

#include <vector>

#include "fragsel/backends.hpp"
#include "fragsel/core.hpp"

namespace fragsel {

struct VisualFilterThresholds {
    double tau_obj = 0.40;
    double tau_sem = 0.35;
    double tau_size = 2500.0;  // px^2

    static VisualFilterThresholds from_config(const Config& cfg) {
        return {cfg.tau_obj, cfg.tau_sem, cfg.tau_size};
    }
};

double box_area(const BoundingBox& box);

// Keeps exactly the candidates with objectness > tau_obj, semantic score >
// tau_sem and area > tau_size (all strict), preserving input order.
std::vector<DetectionCandidate> filter_boxes(const std::vector<DetectionCandidate>& candidates,
                                             const VisualFilterThresholds& thresholds);

// Names of the constraints a candidate fails ("objectness", "semantic",
// "size"); empty means the candidate passes the filter.
std::vector<std::string> failed_constraints(const DetectionCandidate& candidate,
                                            const VisualFilterThresholds& thresholds);

// Runs the detector once on the image document and wraps the surviving
// candidates as visual fragments. Detector scores outside [0,1] are a
// contract violation and raise DetectorFailure.
std::vector<VisualFragment> extract_visual_fragments(const Query& query,
                                                     const Document& image_doc,
                                                     Detector& detector,
                                                     const VisualFilterThresholds& thresholds);

}  // namespace fragsel
