#pragma once

#include <vector>

#include "fragsel/core.hpp"
#include "fragsel/fig.hpp"

namespace fragsel {

// Brute-force truncation: keep top-ranked documents in order until the budget
// runs out. The first text document that does not fit is cut at the largest
// whole-token prefix; images cost image_token_cost and are kept whole or not
// at all.
std::vector<EvidenceItem> truncate_baseline(const Query& query,
                                            const std::vector<Document>& sorted_docs,
                                            long token_budget, long image_token_cost);

// Histogram over left-open right-closed intervals:
//   bucket 0:      fig <= edges[0]
//   bucket i:      edges[i-1] < fig <= edges[i]
//   bucket last:   fig > edges.back()
// Throws UnsortedEdges unless edges are strictly increasing.
std::vector<long> bucket_fig(const std::vector<FigRecord>& records,
                             const std::vector<double>& edges);

}  // namespace fragsel
