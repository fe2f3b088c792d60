#include "fragsel/fig.hpp"

#include <numeric>

#include "fragsel/json_io.hpp"
#include "parallel.hpp"

namespace fragsel {

namespace {

double mean(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

double fig_score(const TokenLogProbs& with_fragment, const TokenLogProbs& without_fragment) {
    with_fragment.validate();
    without_fragment.validate();
    if (with_fragment.answer_tokens != without_fragment.answer_tokens) {
        throw Error(ErrorKind::LengthMismatch,
                    "conditioned and baseline logprobs cover different answer token sequences");
    }
    return mean(with_fragment.logprobs) - mean(without_fragment.logprobs);
}

int hard_label(double fig, double tau_fig) {
    return fig > tau_fig ? 1 : 0;
}

std::vector<FigRecord> build_fig_dataset(const std::vector<FigSample>& samples,
                                         LikelihoodScorer& likelihood,
                                         TeacherScorer* teacher,
                                         const Config& config,
                                         long parallelism) {
    for (const auto& sample : samples) {
        if (sample.fragments.empty()) {
            throw Error(ErrorKind::PreconditionViolation,
                        "query '" + sample.query.id + "' has no fragments");
        }
    }

    std::vector<FigRecord> records;
    for (const auto& sample : samples) {
        TokenLogProbs baseline;
        try {
            baseline = likelihood.logprobs(sample.query, std::nullopt, sample.answer_tokens);
        } catch (const Error& e) {
            throw Error(e.kind(), "query '" + sample.query.id + "' baseline: " + e.what());
        }

        const size_t offset = records.size();
        records.resize(offset + sample.fragments.size());
        detail::parallel_for(static_cast<long>(sample.fragments.size()), parallelism, [&](long i) {
            const EvidenceItem& fragment = sample.fragments[static_cast<size_t>(i)];
            TokenLogProbs conditioned;
            try {
                conditioned = likelihood.logprobs(sample.query, fragment, sample.answer_tokens);
            } catch (const Error& e) {
                throw Error(e.kind(), "query '" + sample.query.id + "' fragment '" +
                                          fragment_key(fragment) + "': " + e.what());
            }
            FigRecord record;
            record.query_id = sample.query.id;
            record.query_text = sample.query.text;
            record.fragment = fragment;
            record.fig = fig_score(conditioned, baseline);
            record.hard_label = hard_label(record.fig, config.tau_fig);
            if (teacher != nullptr) {
                try {
                    record.teacher_logit = teacher->logit(sample.query, fragment);
                } catch (const Error& e) {
                    throw Error(e.kind(), "query '" + sample.query.id + "' fragment '" +
                                              fragment_key(fragment) + "' teacher: " + e.what());
                }
            }
            records[offset + static_cast<size_t>(i)] = std::move(record);
        });
    }
    return records;
}

}  // namespace fragsel
