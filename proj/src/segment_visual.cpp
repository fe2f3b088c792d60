#include "fragsel/segment_visual.hpp"

#include <cmath>

namespace fragsel {

double box_area(const BoundingBox& box) {
    return (box.x_max - box.x_min) * (box.y_max - box.y_min);
}

std::vector<DetectionCandidate> filter_boxes(const std::vector<DetectionCandidate>& candidates,
                                             const VisualFilterThresholds& thresholds) {
    std::vector<DetectionCandidate> kept;
    for (const auto& c : candidates) {
        if (c.objectness > thresholds.tau_obj && c.semantic_score > thresholds.tau_sem &&
            box_area(c.box) > thresholds.tau_size) {
            kept.push_back(c);
        }
    }
    return kept;
}

std::vector<std::string> failed_constraints(const DetectionCandidate& candidate,
                                            const VisualFilterThresholds& thresholds) {
    std::vector<std::string> failed;
    if (!(candidate.objectness > thresholds.tau_obj)) failed.emplace_back("objectness");
    if (!(candidate.semantic_score > thresholds.tau_sem)) failed.emplace_back("semantic");
    if (!(box_area(candidate.box) > thresholds.tau_size)) failed.emplace_back("size");
    return failed;
}

std::vector<VisualFragment> extract_visual_fragments(const Query& query,
                                                     const Document& image_doc,
                                                     Detector& detector,
                                                     const VisualFilterThresholds& thresholds) {
    if (!image_doc.is_image()) {
        throw Error(ErrorKind::NotAnImage,
                    "document '" + image_doc.id + "' is not an image");
    }

    std::vector<DetectionCandidate> candidates = detector.detect(query, image_doc.image_ref);
    for (const auto& c : candidates) {
        if (!(c.objectness >= 0.0 && c.objectness <= 1.0) ||
            !(c.semantic_score >= 0.0 && c.semantic_score <= 1.0)) {
            throw Error(ErrorKind::DetectorFailure,
                        "detector '" + detector.descriptor() +
                            "' returned a score outside [0,1] for image '" +
                            image_doc.image_ref + "'");
        }
        if (!c.box.valid()) {
            throw Error(ErrorKind::DetectorFailure,
                        "detector '" + detector.descriptor() +
                            "' returned a degenerate box for image '" + image_doc.image_ref + "'");
        }
    }

    std::vector<VisualFragment> fragments;
    for (const auto& c : filter_boxes(candidates, thresholds)) {
        VisualFragment frag;
        frag.parent_doc_id = image_doc.id;
        frag.box = c.box;
        frag.objectness = c.objectness;
        frag.semantic_score = c.semantic_score;
        fragments.push_back(frag);
    }
    return fragments;
}

}  // namespace fragsel
