#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tdt {

enum class Label : int { Human = 0, Machine = 1 };

enum class Split { Train, Dev, Test };

std::string to_string(Split split);
Split parse_split(const std::string& text);

// Per-token (mean, variance) of reference-distribution log-probabilities.
struct LogprobStat {
    double mean = 0.0;
    double variance = 0.0;

    bool operator==(const LogprobStat&) const = default;
};

struct DocumentRecord {
    std::string id;
    std::vector<std::string> tokens;
    std::optional<std::vector<double>> logprobs;
    std::optional<std::vector<LogprobStat>> sampled_logprob_stats;
    std::optional<std::vector<double>> z;
    std::optional<Label> label;
    std::map<std::string, std::string> meta;

    // Length of the per-token sequences (after validation all agree).
    std::size_t length() const;

    bool operator==(const DocumentRecord&) const = default;
};

// Throws DataError naming the record id when an invariant is violated.
void validate(const DocumentRecord& record);

// Keeps the first max_tokens entries of every per-token sequence.
DocumentRecord truncate(DocumentRecord record, std::size_t max_tokens);

struct Corpus {
    std::vector<DocumentRecord> records;
    std::vector<Split> splits; // parallel to records

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    void add(DocumentRecord record, Split split = Split::Train);

    // Records whose split is one of `wanted`, in corpus order.
    Corpus subset(std::initializer_list<Split> wanted) const;

    bool operator==(const Corpus&) const = default;
};

inline constexpr std::size_t kDefaultMaxTokens = 512;

// Parses one JSONL line. `line_no` is only used in error messages.
DocumentRecord parse_record(const std::string& line, std::size_t line_no, Split* split_out = nullptr);
std::string serialize_record(const DocumentRecord& record, Split split);

Corpus read_corpus(const std::string& path, std::size_t max_tokens = kDefaultMaxTokens);
void write_corpus(const Corpus& corpus, const std::string& path);

} // namespace tdt
