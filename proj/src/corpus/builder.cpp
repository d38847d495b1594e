#include "ctrltab/corpus/builder.hpp"

#include "ctrltab/util/error.hpp"
#include "ctrltab/util/io.hpp"
#include "ctrltab/util/log.hpp"
#include "ctrltab/util/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <map>

namespace ctrltab::corpus {

std::vector<SourceTable> parse_source_tables(std::string_view jsonl) {
    std::vector<SourceTable> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < jsonl.size()) {
        std::size_t end = jsonl.find('\n', pos);
        if (end == std::string_view::npos) end = jsonl.size();
        ++line_no;
        const std::string_view line = jsonl.substr(pos, end - pos);
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        SourceTable st;
        try {
            const auto j = nlohmann::json::parse(line);
            st.table.id = j.at("id").get<std::string>();
            st.article_id = j.at("article_id").get<std::string>();
            st.table.caption = j.value("caption", std::string{});
            st.table.n_rows = j.at("n_rows").get<int>();
            st.table.n_cols = j.at("n_cols").get<int>();
            for (const auto& cj : j.at("cells")) {
                Cell c;
                c.row = cj.at("row").get<int>();
                c.col = cj.at("col").get<int>();
                c.attribute = cj.value("attribute", std::string{});
                c.value = cj.value("value", std::string{});
                c.is_header = cj.value("is_header", false);
                st.table.cells.push_back(std::move(c));
            }
            st.description = j.at("description").get<std::string>();
        } catch (const std::exception& e) {
            throw ParseError("tables line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        st.table.validate();
        out.push_back(std::move(st));
    }
    return out;
}

std::vector<SourceTable> read_source_tables(const std::string& path) {
    return parse_source_tables(util::read_file(path));
}

std::vector<Article> read_article_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Article> out;
    for (const auto& f : files) {
        try {
            out.push_back(parse_article_xml(util::read_file(f.string())));
        } catch (const ParseError& e) {
            throw ParseError(f.string() + ": " + e.what(), e.position());
        }
    }
    return out;
}

std::vector<PairRecord> build_corpus(const std::vector<Article>& articles,
                                     const std::vector<SourceTable>& tables,
                                     const BuildOptions& opts) {
    std::map<std::string, const Article*> article_by_id;
    for (const auto& a : articles) {
        if (!article_by_id.emplace(a.id, &a).second)
            throw ValidationError("duplicate article id '" + a.id + "'");
    }
    // article id -> indices into `tables`, in input order.
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < tables.size(); ++i) groups[tables[i].article_id].push_back(i);
    std::vector<std::pair<std::string, std::vector<std::size_t>>> work(groups.begin(), groups.end());

    std::vector<std::vector<PairRecord>> results(work.size());
    util::parallel_for(work.size(), opts.threads, [&](std::size_t g) {
        const auto& [article_id, indices] = work[g];
        const Article* article = nullptr;
        if (auto it = article_by_id.find(article_id); it != article_by_id.end()) {
            article = it->second;
        } else {
            util::log_warning("no article '" + article_id + "'; knowledge base left empty");
        }
        std::vector<Table> group_tables;
        for (std::size_t i : indices) {
            Table t = tables[i].table;
            if (t.caption.empty() && article) {
                if (auto c = article->table_captions.find(t.id); c != article->table_captions.end())
                    t.caption = c->second;
            }
            group_tables.push_back(std::move(t));
        }
        std::vector<std::vector<KnowledgeSentence>> aligned(indices.size());
        if (article) {
            std::vector<const Table*> ptrs;
            for (const auto& t : group_tables) ptrs.push_back(&t);
            aligned = greedy_align_all(ptrs, *article, opts.align);
        }
        for (std::size_t k = 0; k < indices.size(); ++k) {
            const SourceTable& src = tables[indices[k]];
            PairRecord p;
            p.id = src.table.id;
            p.table = group_tables[k];
            p.kb.sentences = dedup_against_description(aligned[k], src.description, opts.theta_dup);
            p.highlights = auto_highlight(p.table, src.description);
            p.description = src.description;
            p.split = split_for_id(p.id);
            p.validate();
            results[g].push_back(std::move(p));
        }
    });

    std::vector<PairRecord> out;
    for (auto& r : results) {
        for (auto& p : r) out.push_back(std::move(p));
    }
    return out;
}

} // namespace ctrltab::corpus
