#include "sxsi/index_file.hpp"

#include <zlib.h>

#include <cstring>

namespace sxsi {

namespace {

constexpr char kMagic[8] = {'S', 'X', 'S', 'I', 'I', 'D', 'X', 0};

std::uint64_t checksum(std::span<std::uint8_t const> bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed large sections in pieces.
    for (std::size_t p = 0; p < bytes.size();) {
        auto const n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - p, 1u << 30));
        crc = crc32(crc, bytes.data() + p, n);
        p += n;
    }
    return crc;
}

}  // namespace

std::string_view section_name(Section s) {
    static constexpr std::string_view names[] = {"tags", "par", "tag", "leaves", "bwt", "doc", "samples", "plain"};
    return names[static_cast<std::size_t>(s)];
}

std::vector<std::uint8_t> build_index(std::string_view xml, BuildOptions const& options) {
    if (options.sample_rate == 0) throw std::invalid_argument("sample rate must be positive");
    DocumentModel const model = parse_document(xml, {.keep_whitespace = options.keep_whitespace});
    TreeIndex const tree(model);

    std::array<Writer, kSectionCount> parts;
    auto part = [&](Section s) -> Writer& { return parts[static_cast<std::size_t>(s)]; };
    tree.tags().save(part(Section::Tags));
    tree.par().save(part(Section::Par));
    tree.tag_sequence().save(part(Section::Tag));
    tree.leaves().save(part(Section::Leaves));

    IndexHeader h;
    h.nodes = tree.node_count();
    h.texts = model.texts.size();
    h.tags = tree.tag_count();
    h.sample_rate = options.sample_rate;
    h.flags = (options.plain_text ? IndexHeader::kPlainText : 0) | (options.keep_whitespace ? IndexHeader::kKeepWhitespace : 0);
    if (!model.texts.empty()) {
        FMIndex const fm(model.texts, options.sample_rate);
        h.text_length = fm.length();
        fm.save(part(Section::Bwt), part(Section::Doc), part(Section::Samples));
        if (options.plain_text) PlainTextStore(model.texts).save(part(Section::Plain));
    }

    for (auto& w : parts) w.align();
    Writer out;
    for (char c : kMagic) out.put(c);
    out.put<std::uint32_t>(kIndexVersion);
    out.put<std::uint32_t>(kSectionCount);
    for (std::uint64_t v : {h.nodes, h.texts, h.tags, h.text_length, h.sample_rate, h.flags}) out.put(v);

    std::uint64_t offset = 8 + 8 + 6 * 8 + kSectionCount * 24;
    for (auto const& w : parts) {
        auto const& bytes = w.bytes();
        out.put<std::uint64_t>(bytes.empty() ? 0 : offset);
        out.put<std::uint64_t>(bytes.size());
        out.put<std::uint64_t>(checksum(bytes));
        offset += bytes.size();
    }
    std::vector<std::uint8_t> image = out.take();
    for (auto const& w : parts) image.insert(image.end(), w.bytes().begin(), w.bytes().end());
    return image;
}

IndexFile IndexFile::open(std::string const& path) {
    IndexFile f;
    f.path_ = path;
    f.in_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*f.in_) throw std::runtime_error("cannot open index file " + path);
    f.in_->seekg(0, std::ios::end);
    f.file_size_ = static_cast<std::uint64_t>(f.in_->tellg());
    f.in_->seekg(0);

    std::vector<std::uint8_t> head(8 + 8 + 6 * 8 + kSectionCount * 24);
    if (!f.in_->read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size())))
        throw FormatError("index file too short");
    if (std::memcmp(head.data(), kMagic, 8) != 0) throw FormatError("not an index file");
    Reader r(head);
    for (int i = 0; i < 8; ++i) r.get<char>();
    if (r.get<std::uint32_t>() != kIndexVersion) throw FormatError("unsupported index version");
    if (r.get<std::uint32_t>() != kSectionCount) throw FormatError("bad section count");
    auto& h = f.header_;
    h.nodes = r.get<std::uint64_t>();
    h.texts = r.get<std::uint64_t>();
    h.tags = r.get<std::uint64_t>();
    h.text_length = r.get<std::uint64_t>();
    h.sample_rate = r.get<std::uint64_t>();
    h.flags = r.get<std::uint64_t>();
    for (auto& e : f.table_) {
        e.offset = r.get<std::uint64_t>();
        e.length = r.get<std::uint64_t>();
        e.checksum = r.get<std::uint64_t>();
        if (e.length && (e.offset % 8 || e.offset > f.file_size_ || e.length > f.file_size_ - e.offset))
            throw FormatError("section outside the file");
    }
    for (Section s : {Section::Tags, Section::Par, Section::Tag, Section::Leaves})
        if (!f.has(s)) throw FormatError("missing section " + std::string(section_name(s)));
    return f;
}

std::vector<std::uint8_t> IndexFile::read(Section s) {
    auto const& e = entry(s);
    if (e.length == 0) throw FormatError("index has no " + std::string(section_name(s)) + " section");
    std::vector<std::uint8_t> bytes(e.length);
    in_->clear();
    in_->seekg(static_cast<std::streamoff>(e.offset));
    if (!in_->read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
        throw FormatError("truncated section " + std::string(section_name(s)));
    if (checksum(bytes) != e.checksum) throw FormatError("checksum mismatch in section " + std::string(section_name(s)));
    trace_.push_back(s);
    return bytes;
}

TreeIndex const& IndexFile::tree() {
    if (!tree_) {
        auto const tags = read(Section::Tags), par = read(Section::Par), seq = read(Section::Tag),
                   leaves = read(Section::Leaves);
        Reader rt(tags), rp(par), rs(seq), rl(leaves);
        tree_.emplace(TagDictionary::load(rt), BalancedParens::load(rp), TagSequence::load(rs), BitVector::load(rl));
        if (tree_->node_count() != header_.nodes || tree_->text_count() != header_.texts ||
            tree_->tag_count() != header_.tags)
            throw FormatError("tree sections disagree with the header");
    }
    return *tree_;
}

FMIndex const* IndexFile::fm() {
    if (header_.texts == 0) return nullptr;
    if (!fm_) {
        auto const bwt = read(Section::Bwt), doc = read(Section::Doc), samples = read(Section::Samples);
        Reader rb(bwt), rd(doc), rs(samples);
        fm_.emplace(FMIndex::load(rb, rd, rs));
        if (fm_->text_count() != header_.texts || fm_->length() != header_.text_length)
            throw FormatError("text sections disagree with the header");
    }
    return &*fm_;
}

PlainTextStore const* IndexFile::plain() {
    if (!has(Section::Plain)) return nullptr;
    if (!plain_) {
        auto const bytes = read(Section::Plain);
        Reader r(bytes);
        plain_.emplace(PlainTextStore::load(r));
        if (plain_->text_count() != header_.texts) throw FormatError("plain text section disagrees with the header");
    }
    return &*plain_;
}

TextSource IndexFile::texts() {
    if (auto const* p = plain()) return {nullptr, p};
    return {fm(), nullptr};
}

}  // namespace sxsi
