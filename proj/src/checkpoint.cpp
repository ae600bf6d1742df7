#include "rddl/siamese.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace rddl::nn {

namespace {

constexpr const char* kMagic = "RDDL-SIAMESE 1";

void put_le(std::ostream& os, double x) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

double get_le(std::istream& is) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("checkpoint truncated");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
    const auto& c = model.config();
    char lr[64];
    std::snprintf(lr, sizeof lr, "%.17g", c.learning_rate);
    os << kMagic << '\n'
       << "vocab_size " << c.vocab_size << '\n'
       << "relation_count " << c.relation_count << '\n'
       << "num_paths " << c.num_paths << '\n'
       << "embed_dim " << c.embed_dim << '\n'
       << "hidden_dim " << c.hidden_dim << '\n'
       << "layers " << c.layers << '\n'
       << "fusion_dim " << c.fusion_dim << '\n'
       << "learning_rate " << lr << '\n'
       << "batch_size " << c.batch_size << '\n'
       << "epochs " << c.epochs << '\n'
       << "seed " << c.seed << '\n'
       << "params " << model.params().size() << '\n'
       << "end\n";
    for (double x : model.params()) put_le(os, x);
    if (!os) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read checkpoint " + path.string());
    std::string line;
    if (!std::getline(is, line) || line != kMagic) throw std::runtime_error("not a checkpoint: " + path.string());
    std::map<std::string, std::string> kv;
    while (std::getline(is, line) && line != "end") {
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw std::runtime_error("malformed checkpoint header line: " + line);
        kv[line.substr(0, sp)] = line.substr(sp + 1);
    }
    if (line != "end") throw std::runtime_error("checkpoint header not terminated");
    auto num = [&](const char* key) -> std::uint64_t {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::runtime_error(std::string("checkpoint missing ") + key);
        return std::stoull(it->second);
    };
    ModelConfig c;
    c.vocab_size = num("vocab_size");
    c.relation_count = num("relation_count");
    c.num_paths = num("num_paths");
    c.embed_dim = num("embed_dim");
    c.hidden_dim = num("hidden_dim");
    c.layers = num("layers");
    c.fusion_dim = num("fusion_dim");
    c.batch_size = num("batch_size");
    c.epochs = num("epochs");
    c.seed = num("seed");
    if (!kv.count("learning_rate")) throw std::runtime_error("checkpoint missing learning_rate");
    c.learning_rate = std::stod(kv["learning_rate"]);
    Model model(c);
    if (num("params") != model.params().size()) throw std::runtime_error("checkpoint parameter count mismatch");
    for (auto& x : model.params()) x = get_le(is);
    return model;
}

}  // namespace rddl::nn
