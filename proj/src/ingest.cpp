#include "tdt/ingest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "tdt/error.hpp"

namespace tdt {

using nlohmann::json;

namespace {

const char* const kKnownKeys[] = {"id", "tokens", "logprobs", "sampled_logprob_stats",
                                  "z", "label", "meta", "split"};

std::string where(std::size_t line_no) {
    return "line " + std::to_string(line_no);
}

std::vector<double> read_reals(const json& value, const char* field, std::size_t line_no) {
    if (!value.is_array()) {
        throw DataError(where(line_no) + ": field '" + field + "' must be an array of numbers");
    }
    std::vector<double> out;
    out.reserve(value.size());
    for (const auto& v : value) {
        if (!v.is_number()) {
            throw DataError(where(line_no) + ": field '" + field + "' contains a non-number");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

std::string to_string(Split split) {
    switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
    }
    return "train";
}

Split parse_split(const std::string& text) {
    if (text == "train") return Split::Train;
    if (text == "dev") return Split::Dev;
    if (text == "test") return Split::Test;
    throw DataError("unknown split '" + text + "' (expected train, dev or test)");
}

std::size_t DocumentRecord::length() const {
    if (z) return z->size();
    if (logprobs) return logprobs->size();
    return tokens.size();
}

void validate(const DocumentRecord& record) {
    const std::string who = "record '" + record.id + "'";
    if (record.id.empty()) throw DataError("record with empty id");

    const bool has_scored = record.logprobs && record.sampled_logprob_stats;
    if (!has_scored && !record.z) {
        throw DataError(who + ": needs either z or logprobs + sampled_logprob_stats");
    }

    std::optional<std::size_t> n;
    auto check = [&](std::size_t len, const char* field) {
        if (!n) {
            n = len;
        } else if (*n != len) {
            throw DataError(who + ": length mismatch, '" + field + "' has " + std::to_string(len) +
                            " entries, expected " + std::to_string(*n));
        }
    };
    if (record.z) check(record.z->size(), "z");
    if (record.logprobs) check(record.logprobs->size(), "logprobs");
    if (record.sampled_logprob_stats) check(record.sampled_logprob_stats->size(), "sampled_logprob_stats");
    if (!record.tokens.empty()) check(record.tokens.size(), "tokens");
    if (!n || *n == 0) throw DataError(who + ": per-token sequences must be non-empty");
}

DocumentRecord truncate(DocumentRecord record, std::size_t max_tokens) {
    auto cut = [max_tokens](auto& seq) {
        if (seq.size() > max_tokens) seq.resize(max_tokens);
    };
    cut(record.tokens);
    if (record.logprobs) cut(*record.logprobs);
    if (record.sampled_logprob_stats) cut(*record.sampled_logprob_stats);
    if (record.z) cut(*record.z);
    return record;
}

void Corpus::add(DocumentRecord record, Split split) {
    records.push_back(std::move(record));
    splits.push_back(split);
}

Corpus Corpus::subset(std::initializer_list<Split> wanted) const {
    Corpus out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (Split s : wanted) {
            if (splits[i] == s) {
                out.add(records[i], s);
                break;
            }
        }
    }
    return out;
}

DocumentRecord parse_record(const std::string& line, std::size_t line_no, Split* split_out) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw DataError(where(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw DataError(where(line_no) + ": expected a JSON object");

    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : kKnownKeys) known = known || item.key() == key;
        if (!known) throw DataError(where(line_no) + ": unknown field '" + item.key() + "'");
    }

    DocumentRecord rec;
    if (!obj.contains("id") || !obj["id"].is_string()) {
        throw DataError(where(line_no) + ": missing string field 'id'");
    }
    rec.id = obj["id"].get<std::string>();

    if (obj.contains("tokens")) {
        const auto& toks = obj["tokens"];
        if (!toks.is_array()) throw DataError(where(line_no) + ": field 'tokens' must be an array");
        for (const auto& t : toks) {
            if (!t.is_string()) throw DataError(where(line_no) + ": field 'tokens' contains a non-string");
            rec.tokens.push_back(t.get<std::string>());
        }
    }
    if (obj.contains("logprobs")) rec.logprobs = read_reals(obj["logprobs"], "logprobs", line_no);
    if (obj.contains("z")) rec.z = read_reals(obj["z"], "z", line_no);
    if (obj.contains("sampled_logprob_stats")) {
        const auto& stats = obj["sampled_logprob_stats"];
        if (!stats.is_array()) {
            throw DataError(where(line_no) + ": field 'sampled_logprob_stats' must be an array");
        }
        std::vector<LogprobStat> out;
        for (const auto& pair : stats) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
                throw DataError(where(line_no) +
                                ": 'sampled_logprob_stats' entries must be [mean, variance] pairs");
            }
            out.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
        rec.sampled_logprob_stats = std::move(out);
    }
    if (obj.contains("label") && !obj["label"].is_null()) {
        const auto& lab = obj["label"];
        if (!lab.is_number_integer() || (lab.get<int>() != 0 && lab.get<int>() != 1)) {
            throw DataError(where(line_no) + ": record '" + rec.id + "': label must be 0 or 1");
        }
        rec.label = static_cast<Label>(lab.get<int>());
    }
    if (obj.contains("meta")) {
        const auto& meta = obj["meta"];
        if (!meta.is_object()) throw DataError(where(line_no) + ": field 'meta' must be an object");
        for (const auto& item : meta.items()) {
            if (!item.value().is_string()) {
                throw DataError(where(line_no) + ": meta value '" + item.key() + "' must be a string");
            }
            rec.meta[item.key()] = item.value().get<std::string>();
        }
    }
    Split split = Split::Train;
    if (obj.contains("split")) {
        if (!obj["split"].is_string()) throw DataError(where(line_no) + ": field 'split' must be a string");
        try {
            split = parse_split(obj["split"].get<std::string>());
        } catch (const DataError& e) {
            throw DataError(where(line_no) + ": " + e.what());
        }
    }
    if (split_out) *split_out = split;

    try {
        validate(rec);
    } catch (const DataError& e) {
        throw DataError(where(line_no) + ": " + e.what());
    }
    return rec;
}

std::string serialize_record(const DocumentRecord& record, Split split) {
    json obj = json::object();
    obj["id"] = record.id;
    if (!record.tokens.empty()) obj["tokens"] = record.tokens;
    if (record.logprobs) obj["logprobs"] = *record.logprobs;
    if (record.sampled_logprob_stats) {
        json stats = json::array();
        for (const auto& s : *record.sampled_logprob_stats) stats.push_back({s.mean, s.variance});
        obj["sampled_logprob_stats"] = std::move(stats);
    }
    if (record.z) obj["z"] = *record.z;
    if (record.label) obj["label"] = static_cast<int>(*record.label);
    if (!record.meta.empty()) obj["meta"] = record.meta;
    obj["split"] = to_string(split);
    return obj.dump(-1, ' ', false, json::error_handler_t::strict);
}

Corpus read_corpus(const std::string& path, std::size_t max_tokens) {
    if (max_tokens == 0) throw UsageError("max_tokens must be positive");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file '" + path + "'");

    Corpus corpus;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        Split split = Split::Train;
        DocumentRecord rec = parse_record(line, line_no, &split);
        if (!ids.insert(rec.id).second) {
            throw DataError(where(line_no) + ": duplicate record id '" + rec.id + "'");
        }
        corpus.add(truncate(std::move(rec), max_tokens), split);
    }
    if (corpus.empty()) throw DataError("corpus file '" + path + "' is empty");
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
    std::unordered_set<std::string> ids;
    for (const auto& rec : corpus.records) {
        validate(rec);
        if (!ids.insert(rec.id).second) throw DataError("duplicate record id '" + rec.id + "'");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        out << serialize_record(corpus.records[i], corpus.splits[i]) << '\n';
    }
    if (!out) throw DataError("write failure on '" + path + "'");
}

} // namespace tdt
