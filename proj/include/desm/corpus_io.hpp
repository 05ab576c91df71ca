#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace desm {

/// Resettable stream of tokenized records (one record = one sentence, query
/// or document body). Multiple passes are required for vocabulary building
/// and multi-epoch training.
class RecordSource {
public:
    virtual ~RecordSource() = default;
    /// Fills `tokens` with the next record; returns false at end of stream.
    virtual bool next(std::vector<std::string>& tokens) = 0;
    virtual void reset() = 0;
};

/// In-memory records, primarily for tests and synthetic corpora.
class MemoryCorpus : public RecordSource {
public:
    explicit MemoryCorpus(std::vector<std::vector<std::string>> records)
        : records_(std::move(records)) {}

    bool next(std::vector<std::string>& tokens) override;
    void reset() override { pos_ = 0; }

private:
    std::vector<std::vector<std::string>> records_;
    std::size_t pos_ = 0;
};

/// UTF-8 text file, one record per line, tokenized on the fly.
class LineCorpus : public RecordSource {
public:
    explicit LineCorpus(std::string path);  // throws std::runtime_error if unreadable

    bool next(std::vector<std::string>& tokens) override;
    void reset() override;

private:
    std::string path_;
    std::ifstream in_;
};

/// Identified record: "id<ws>free text...". Used for document collections,
/// query sets and labeled passages.
struct IdText {
    std::string id;
    std::string text;
};

/// Reads "id text..." lines; blank lines are skipped. An id with no text
/// yields an empty text (a legal empty document).
std::vector<IdText> read_id_text_file(const std::string& path);

/// One id per line, e.g. a full-collection candidate list.
std::vector<std::string> read_id_list(const std::string& path);

}  // namespace desm
