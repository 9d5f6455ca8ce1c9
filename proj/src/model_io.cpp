#include "tropnnc/model_io.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace tropnnc {

namespace {

constexpr const char* kMagic = "TNNC1";

struct TensorRecord {
    std::string name;
    std::string dtype; // f32 | f64
    std::vector<std::size_t> shape;
    std::size_t byte_offset = 0;

    std::size_t byte_size() const {
        return Tensor::numel_of(shape) * (dtype == "f32" ? 4 : 8);
    }
};

void write_le_doubles(std::string& blob, const Tensor& t) {
    // host is little-endian on every supported target; assert at build time
    static_assert(sizeof(double) == 8);
    const std::size_t off = blob.size();
    blob.resize(off + t.numel() * 8);
    std::memcpy(blob.data() + off, t.data.data(), t.numel() * 8);
}

std::string tensor_header_line(const std::string& name, const Tensor& t, std::size_t offset) {
    std::ostringstream os;
    os << "tensor " << name << " f64 " << t.ndim();
    for (std::size_t d : t.shape) os << ' ' << d;
    os << ' ' << offset;
    return os.str();
}

} // namespace

void save_model(const Network& net, std::ostream& os) {
    std::ostringstream header;
    std::string blob;
    std::vector<std::string> tensor_lines;
    std::size_t tid = 0;

    auto emit = [&](const Tensor& t) {
        const std::string name = "t" + std::to_string(tid++);
        tensor_lines.push_back(tensor_header_line(name, t, blob.size()));
        write_le_doubles(blob, t);
        return name;
    };

    header << kMagic << "\n";
    header << "input_shape " << net.input_shape.size();
    for (std::size_t d : net.input_shape) header << ' ' << d;
    header << "\n";
    header << "layers " << net.layers.size() << "\n";
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const Layer& layer = net.layers[li];
        header << "layer " << li << ' ' << layer_kind_name(layer);
        if (const auto* lin = std::get_if<LinearLayer>(&layer)) {
            header << " in " << lin->weight.shape[1] << " out " << lin->weight.shape[0]
                   << " weight " << emit(lin->weight) << " bias " << emit(lin->bias);
        } else if (const auto* conv = std::get_if<Conv2dLayer>(&layer)) {
            header << " in_channels " << conv->kernel.shape[1] << " out_channels "
                   << conv->kernel.shape[0] << " kernel " << conv->kernel.shape[2] << ' '
                   << conv->kernel.shape[3] << " stride " << conv->stride << " padding "
                   << conv->padding << " weight " << emit(conv->kernel) << " bias "
                   << emit(conv->bias);
        } else if (const auto* mp = std::get_if<MaxPoolLayer>(&layer)) {
            header << " size " << mp->size << " stride " << mp->stride;
        } else if (const auto* ap = std::get_if<AvgPoolLayer>(&layer)) {
            header << " size " << ap->size << " stride " << ap->stride;
        } else if (const auto* bn = std::get_if<BatchNormLayer>(&layer)) {
            header << " channels " << bn->gamma.shape[0] << " epsilon " << bn->epsilon
                   << " gamma " << emit(bn->gamma) << " beta " << emit(bn->beta)
                   << " running_mean " << emit(bn->running_mean) << " running_var "
                   << emit(bn->running_var);
        }
        header << "\n";
    }
    for (const auto& line : tensor_lines) header << line << "\n";
    header << "blob_bytes " << blob.size() << "\n";
    header << "end_header\n";

    os << header.str();
    os.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!os) throw IoError("save_model: write failed");
}

void save_model(const Network& net, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("save_model: cannot open " + path);
    save_model(net, f);
}

namespace {

class HeaderParser {
  public:
    explicit HeaderParser(std::istream& is) : is_(is) {}

    bool next_line(std::vector<std::string>& tokens) {
        std::string line;
        if (!std::getline(is_, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        tokens.clear();
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
        return true;
    }

  private:
    std::istream& is_;
};

std::size_t to_size(const std::string& s) {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw ModelFormatError("bad integer field: " + s);
    return static_cast<std::size_t>(v);
}

} // namespace

Network load_model(std::istream& is) {
    HeaderParser parser(is);
    std::vector<std::string> tok;

    if (!parser.next_line(tok) || tok.size() != 1 || tok[0] != kMagic)
        throw ModelFormatError("bad magic: expected TNNC1");

    Network net;
    struct PendingLayer {
        std::string kind;
        std::map<std::string, std::string> fields;
    };
    std::vector<PendingLayer> pending;
    std::map<std::string, TensorRecord> records;
    std::size_t declared_layers = 0;
    std::size_t blob_bytes = 0;
    bool saw_blob_bytes = false;

    while (true) {
        if (!parser.next_line(tok)) throw ModelFormatError("truncated header: missing end_header");
        if (tok.empty()) continue;
        const std::string& key = tok[0];
        if (key == "end_header") break;
        if (key == "input_shape") {
            if (tok.size() < 2) throw ModelFormatError("malformed input_shape line");
            const std::size_t nd = to_size(tok[1]);
            if (tok.size() != 2 + nd) throw ModelFormatError("malformed input_shape line");
            for (std::size_t i = 0; i < nd; ++i) net.input_shape.push_back(to_size(tok[2 + i]));
        } else if (key == "layers") {
            if (tok.size() != 2) throw ModelFormatError("malformed layers line");
            declared_layers = to_size(tok[1]);
        } else if (key == "layer") {
            if (tok.size() < 3) throw ModelFormatError("malformed layer line");
            PendingLayer pl;
            pl.kind = tok[2];
            for (std::size_t i = 3; i < tok.size(); i += 2) {
                if (i + 1 >= tok.size())
                    throw ModelFormatError("layer field without a value: " + tok[i]);
                if (pl.kind == "conv2d" && tok[i] == "kernel") {
                    if (i + 2 >= tok.size()) throw ModelFormatError("conv2d kernel needs two dims");
                    pl.fields["kernel_h"] = tok[i + 1];
                    pl.fields["kernel_w"] = tok[i + 2];
                    ++i;
                } else {
                    pl.fields[tok[i]] = tok[i + 1];
                }
            }
            pending.push_back(std::move(pl));
        } else if (key == "tensor") {
            if (tok.size() < 4) throw ModelFormatError("malformed tensor line");
            TensorRecord rec;
            rec.name = tok[1];
            rec.dtype = tok[2];
            if (rec.dtype != "f32" && rec.dtype != "f64")
                throw ModelFormatError("unknown dtype: " + rec.dtype);
            const std::size_t nd = to_size(tok[3]);
            if (tok.size() != 5 + nd) throw ModelFormatError("malformed tensor line for " + rec.name);
            for (std::size_t i = 0; i < nd; ++i) rec.shape.push_back(to_size(tok[4 + i]));
            rec.byte_offset = to_size(tok[4 + nd]);
            records[rec.name] = rec;
        } else if (key == "blob_bytes") {
            if (tok.size() != 2) throw ModelFormatError("malformed blob_bytes line");
            blob_bytes = to_size(tok[1]);
            saw_blob_bytes = true;
        } else {
            throw ModelFormatError("unknown header key: " + key);
        }
    }

    if (!saw_blob_bytes) throw ModelFormatError("header missing blob_bytes");
    if (declared_layers != pending.size())
        throw ModelFormatError("declared layer count does not match layer lines");

    std::string blob(blob_bytes, '\0');
    is.read(blob.data(), static_cast<std::streamsize>(blob_bytes));
    if (static_cast<std::size_t>(is.gcount()) != blob_bytes)
        throw ModelFormatError("blob shorter than declared");

    auto fetch = [&](const std::string& name) -> Tensor {
        auto it = records.find(name);
        if (it == records.end()) throw ModelFormatError("tensor not declared: " + name);
        const TensorRecord& rec = it->second;
        if (rec.byte_offset + rec.byte_size() > blob.size())
            throw ModelFormatError("tensor " + name + " extends past end of blob");
        const std::size_t n = Tensor::numel_of(rec.shape);
        Tensor t(rec.shape);
        if (rec.dtype == "f64") {
            std::memcpy(t.data.data(), blob.data() + rec.byte_offset, n * 8);
        } else {
            std::vector<float> tmp(n);
            std::memcpy(tmp.data(), blob.data() + rec.byte_offset, n * 4);
            for (std::size_t i = 0; i < n; ++i) t.data[i] = static_cast<double>(tmp[i]);
        }
        return t;
    };

    auto field = [&](const PendingLayer& pl, const std::string& name) -> const std::string& {
        auto it = pl.fields.find(name);
        if (it == pl.fields.end())
            throw ModelFormatError(pl.kind + " layer missing field: " + name);
        return it->second;
    };

    for (const PendingLayer& pl : pending) {
        if (pl.kind == "linear") {
            LinearLayer lin;
            lin.weight = fetch(field(pl, "weight"));
            lin.bias = fetch(field(pl, "bias"));
            if (lin.weight.ndim() != 2 || lin.weight.shape[0] != to_size(field(pl, "out")) ||
                lin.weight.shape[1] != to_size(field(pl, "in")))
                throw ModelFormatError("linear weight shape disagrees with in/out fields");
            net.layers.emplace_back(std::move(lin));
        } else if (pl.kind == "conv2d") {
            Conv2dLayer conv;
            conv.kernel = fetch(field(pl, "weight"));
            conv.bias = fetch(field(pl, "bias"));
            conv.stride = to_size(field(pl, "stride"));
            conv.padding = to_size(field(pl, "padding"));
            if (conv.kernel.ndim() != 4 ||
                conv.kernel.shape[0] != to_size(field(pl, "out_channels")) ||
                conv.kernel.shape[1] != to_size(field(pl, "in_channels")) ||
                conv.kernel.shape[2] != to_size(field(pl, "kernel_h")) ||
                conv.kernel.shape[3] != to_size(field(pl, "kernel_w")))
                throw ModelFormatError("conv2d kernel shape disagrees with declared fields");
            net.layers.emplace_back(std::move(conv));
        } else if (pl.kind == "relu") {
            net.layers.emplace_back(ReluLayer{});
        } else if (pl.kind == "maxpool") {
            net.layers.emplace_back(MaxPoolLayer{to_size(field(pl, "size")), to_size(field(pl, "stride"))});
        } else if (pl.kind == "avgpool") {
            net.layers.emplace_back(AvgPoolLayer{to_size(field(pl, "size")), to_size(field(pl, "stride"))});
        } else if (pl.kind == "batchnorm") {
            BatchNormLayer bn;
            bn.gamma = fetch(field(pl, "gamma"));
            bn.beta = fetch(field(pl, "beta"));
            bn.running_mean = fetch(field(pl, "running_mean"));
            bn.running_var = fetch(field(pl, "running_var"));
            bn.epsilon = std::stod(field(pl, "epsilon"));
            net.layers.emplace_back(std::move(bn));
        } else if (pl.kind == "flatten") {
            net.layers.emplace_back(FlattenLayer{});
        } else {
            throw ModelFormatError("unknown layer kind: " + pl.kind);
        }
    }

    try {
        validate(net);
    } catch (const ShapeError& e) {
        throw ModelFormatError(std::string("model fails validation: ") + e.what());
    }
    return net;
}

Network load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("load_model: cannot open " + path);
    return load_model(f);
}

} // namespace tropnnc
