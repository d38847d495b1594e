#include "ctrltab/eval/metrics.hpp"

#include "ctrltab/corpus/mentions.hpp"
#include "ctrltab/eval/porter.hpp"
#include "ctrltab/util/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace ctrltab::eval {
namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const TokenSeq& seq, std::size_t n) {
    NgramCounts out;
    if (seq.size() < n) return out;
    for (std::size_t i = 0; i + n <= seq.size(); ++i)
        ++out[std::vector<std::string>(seq.begin() + static_cast<std::ptrdiff_t>(i),
                                       seq.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return out;
}

} // namespace

BleuDetail bleu_detail(const std::vector<TokenSeq>& candidates, const std::vector<TokenSeq>& references) {
    if (candidates.size() != references.size())
        throw ValidationError("bleu: candidate and reference counts differ");
    if (candidates.empty()) throw ValidationError("bleu: empty corpus");
    std::array<std::size_t, 4> matched{}, total{};
    BleuDetail d;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        d.candidate_length += candidates[i].size();
        d.reference_length += references[i].size();
        for (std::size_t n = 1; n <= 4; ++n) {
            const NgramCounts cand = ngrams(candidates[i], n);
            const NgramCounts ref = ngrams(references[i], n);
            for (const auto& [g, c] : cand) {
                auto it = ref.find(g);
                matched[n - 1] += std::min(c, it == ref.end() ? std::size_t{0} : it->second);
                total[n - 1] += c;
            }
        }
    }
    double log_sum = 0;
    bool zero = false;
    for (std::size_t n = 0; n < 4; ++n) {
        d.precisions[n] = total[n] ? static_cast<double>(matched[n]) / static_cast<double>(total[n]) : 0.0;
        if (d.precisions[n] == 0) zero = true;
        else log_sum += 0.25 * std::log(d.precisions[n]);
    }
    if (d.candidate_length < d.reference_length)
        d.brevity_penalty = d.candidate_length == 0
                                ? 0.0
                                : std::exp(1.0 - static_cast<double>(d.reference_length) /
                                                     static_cast<double>(d.candidate_length));
    d.score = zero ? 0.0 : d.brevity_penalty * std::exp(log_sum);
    return d;
}

double bleu(const std::vector<TokenSeq>& candidates, const std::vector<TokenSeq>& references) {
    return bleu_detail(candidates, references).score;
}

namespace {

/// Branch-and-bound over alignments that keep the maximum match count. The
/// search visits candidate tokens left to right and tries the reference
/// position that continues the current chunk first, so the first complete
/// alignment is already the greedy one.
class ChunkSearch {
public:
    ChunkSearch(const std::vector<int>& cls_c, const std::vector<int>& cls_r, std::size_t n_classes)
        : cls_c_(cls_c), cls_r_(cls_r), need_(n_classes, 0), left_c_(n_classes, 0),
          used_(cls_r.size(), false), align_(cls_c.size(), -1) {
        std::vector<std::size_t> cc(n_classes, 0), rc(n_classes, 0);
        for (int k : cls_c) ++cc[static_cast<std::size_t>(k)];
        for (int k : cls_r) ++rc[static_cast<std::size_t>(k)];
        for (std::size_t k = 0; k < n_classes; ++k) {
            need_[k] = std::min(cc[k], rc[k]);
            left_c_[k] = cc[k];
            matches_ += need_[k];
        }
    }

    std::size_t matches() const { return matches_; }

    std::size_t run() {
        if (matches_ == 0) return 0;
        best_ = std::numeric_limits<std::size_t>::max();
        dfs(0, 0, -2);
        return best_;
    }

private:
    void dfs(std::size_t i, std::size_t chunks, int prev_r) {
        if (chunks >= best_ || ++nodes_ > kNodeBudget) return;
        if (i == cls_c_.size()) {
            best_ = chunks;
            return;
        }
        const auto k = static_cast<std::size_t>(cls_c_[i]);
        const bool prev_aligned = i > 0 && align_[i - 1] >= 0;
        --left_c_[k];
        if (need_[k] > 0) {
            std::vector<int> options;
            for (std::size_t r = 0; r < cls_r_.size(); ++r)
                if (!used_[r] && static_cast<std::size_t>(cls_r_[r]) == k) options.push_back(static_cast<int>(r));
            std::stable_partition(options.begin(), options.end(),
                                  [&](int r) { return prev_aligned && r == prev_r + 1; });
            for (int r : options) {
                const bool extends = prev_aligned && r == prev_r + 1;
                used_[static_cast<std::size_t>(r)] = true;
                align_[i] = r;
                --need_[k];
                dfs(i + 1, chunks + (extends ? 0 : 1), r);
                ++need_[k];
                align_[i] = -1;
                used_[static_cast<std::size_t>(r)] = false;
            }
        }
        // Skipping is allowed only while enough class members remain.
        if (left_c_[k] >= need_[k]) dfs(i + 1, chunks, prev_r);
        ++left_c_[k];
    }

    static constexpr std::size_t kNodeBudget = 200000;

    std::vector<int> cls_c_, cls_r_;
    std::vector<std::size_t> need_, left_c_;
    std::vector<bool> used_;
    std::vector<int> align_;
    std::size_t matches_ = 0;
    std::size_t best_ = 0;
    std::size_t nodes_ = 0;
};

} // namespace

MeteorDetail meteor_detail(const TokenSeq& candidate, const TokenSeq& reference) {
    MeteorDetail d;
    if (candidate.empty() || reference.empty()) return d;
    // Exact matches imply equal stems, so grouping by stem yields the same
    // maximum as an exact stage followed by a stem stage.
    std::map<std::string, int> classes;
    auto class_of = [&](const std::string& tok) {
        auto [it, _] = classes.emplace(porter_stem(tok), static_cast<int>(classes.size()));
        return it->second;
    };
    std::vector<int> cls_c, cls_r;
    for (const auto& t : candidate) cls_c.push_back(class_of(t));
    for (const auto& t : reference) cls_r.push_back(class_of(t));
    ChunkSearch search(cls_c, cls_r, classes.size());
    d.matches = search.matches();
    if (d.matches == 0) return d;
    d.chunks = search.run();
    d.precision = static_cast<double>(d.matches) / static_cast<double>(candidate.size());
    d.recall = static_cast<double>(d.matches) / static_cast<double>(reference.size());
    const double fmean = d.precision * d.recall / (0.9 * d.precision + 0.1 * d.recall);
    const double frag = static_cast<double>(d.chunks) / static_cast<double>(d.matches);
    d.score = fmean * (1.0 - 0.5 * frag * frag * frag);
    return d;
}

double meteor(const TokenSeq& candidate, const TokenSeq& reference) {
    return meteor_detail(candidate, reference).score;
}

double cell_recall(std::string_view output, const HighlightSet& highlights, const Table& table) {
    if (highlights.refs.empty()) return 1.0;
    std::size_t hit = 0;
    for (const CellRef& ref : highlights.refs)
        if (corpus::has_value_mention(output, table, ref)) ++hit;
    return static_cast<double>(hit) / static_cast<double>(highlights.refs.size());
}

} // namespace ctrltab::eval
