#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ctrltab {

/// (row, col) coordinate of a table cell, both 0-based.
struct CellRef {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

/// One attribute-value pair of a table.
struct Cell {
    int row = 0;
    int col = 0;
    std::string attribute;
    std::string value;
    bool is_header = false;

    CellRef ref() const { return {row, col}; }

    friend bool operator==(const Cell&, const Cell&) = default;
};

struct Table {
    std::string id;
    std::string caption;
    int n_rows = 0;
    int n_cols = 0;
    std::vector<Cell> cells;

    /// Returns nullptr when no cell sits at `ref`.
    const Cell* find(CellRef ref) const;

    /// Cells sorted row-major.
    std::vector<const Cell*> row_major() const;

    /// Throws ValidationError on out-of-range or duplicate coordinates, or a
    /// cell with both attribute and value empty.
    void validate() const;

    friend bool operator==(const Table&, const Table&) = default;
};

/// Highlighted cells acting as the user-preference prompt. Kept sorted
/// row-major so iteration order is canonical.
struct HighlightSet {
    std::set<CellRef> refs;

    bool contains(CellRef r) const { return refs.count(r) != 0; }
    std::size_t size() const { return refs.size(); }
    bool empty() const { return refs.empty(); }

    /// Throws ValidationError naming `owner` if a ref has no cell in `table`.
    void validate_against(const Table& table, std::string_view owner) const;

    friend bool operator==(const HighlightSet&, const HighlightSet&) = default;
};

enum class KbStatus { automatic, accepted, rejected };

std::string_view to_string(KbStatus s);
KbStatus kb_status_from_string(std::string_view s);

struct KnowledgeSentence {
    std::string id;
    std::string text;
    KbStatus status = KbStatus::automatic;
    /// Byte span [first, second) in the source article, when known.
    std::optional<std::pair<std::size_t, std::size_t>> source_offset;

    /// Only automatic -> accepted and automatic -> rejected are legal.
    void transition(KbStatus next);

    friend bool operator==(const KnowledgeSentence&, const KnowledgeSentence&) = default;
};

struct KnowledgeBase {
    std::vector<KnowledgeSentence> sentences;

    std::size_t size() const { return sentences.size(); }
    bool empty() const { return sentences.empty(); }
    const KnowledgeSentence* find(std::string_view id) const;

    /// Throws ValidationError on duplicate ids or empty sentence text.
    void validate(std::string_view owner) const;

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

enum class Split { train, dev, test };

std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

/// Stable 80/10/10 assignment from the FNV-1a hash of the pair id.
Split split_for_id(std::string_view pair_id);

/// One task instance: table T, highlights H, knowledge base B, and the
/// reference description R.
struct PairRecord {
    std::string id;
    Table table;
    HighlightSet highlights;
    KnowledgeBase kb;
    std::string description;
    Split split = Split::train;

    void validate() const;

    friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

} // namespace ctrltab
