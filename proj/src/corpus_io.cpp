#include "desm/corpus_io.hpp"

#include <stdexcept>

#include "desm/tokenize.hpp"

namespace desm {

bool MemoryCorpus::next(std::vector<std::string>& tokens) {
    if (pos_ >= records_.size()) return false;
    tokens = records_[pos_++];
    return true;
}

LineCorpus::LineCorpus(std::string path) : path_(std::move(path)), in_(path_) {
    if (!in_) throw std::runtime_error("cannot open corpus file: " + path_);
}

bool LineCorpus::next(std::vector<std::string>& tokens) {
    std::string line;
    if (!std::getline(in_, line)) return false;
    tokens = tokenize(line);
    return true;
}

void LineCorpus::reset() {
    in_.clear();
    in_.seekg(0);
}

std::vector<IdText> read_id_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<IdText> out;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t i = 0;
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i == line.size()) continue;
        std::size_t id_end = i;
        while (id_end < line.size() && line[id_end] != ' ' && line[id_end] != '\t') ++id_end;
        std::size_t text_begin = id_end;
        while (text_begin < line.size() && (line[text_begin] == ' ' || line[text_begin] == '\t'))
            ++text_begin;
        out.push_back({line.substr(i, id_end - i), line.substr(text_begin)});
    }
    return out;
}

std::vector<std::string> read_id_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> ids;
    std::string id;
    while (in >> id) ids.push_back(id);
    return ids;
}

}  // namespace desm
