#include "report.hpp"
#include "errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace patchprov {

namespace {

using nlohmann::json;

double round_3(double v)
{
    return std::round(v * 1000.0) / 1000.0;
}

int eval_index(PrLabel label)
{
    switch (label) {
    case PrLabel::PA:
        return 0;
    case PrLabel::PN:
        return 1;
    case PrLabel::NE:
        return 2;
    case PrLabel::CL:
        break;
    }
    throw Error(ErrorCode::InvalidArgument,
        "evaluation labels must be PA, PN, or NE (drop CL rows first)");
}

std::string csv_field(const std::string& value)
{
    if (value.find_first_of(",\"\n\r") == std::string::npos)
        return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

} // namespace

std::optional<Quartiles> integration_quartiles(std::vector<double> values)
{
    if (values.empty())
        return std::nullopt;
    std::sort(values.begin(), values.end());
    auto at = [&](double p) {
        double h = (static_cast<double>(values.size()) - 1.0) * p;
        size_t lo = static_cast<size_t>(h);
        double frac = h - static_cast<double>(lo);
        if (lo + 1 >= values.size())
            return values.back();
        return values[lo] + frac * (values[lo + 1] - values[lo]);
    };
    Quartiles q;
    q.q1 = round_tenths(at(0.25));
    q.median = round_tenths(at(0.5));
    q.q3 = round_tenths(at(0.75));
    return q;
}

CorpusSummary summarize(const std::vector<PullRequestVerdict>& verdicts, int n,
    long snippet_total)
{
    CorpusSummary s;
    s.n = n;
    s.snippet_total = snippet_total;
    std::vector<double> integration;
    for (const auto& v : verdicts) {
        switch (v.label) {
        case PrLabel::PA:
            ++s.pr_pa;
            break;
        case PrLabel::PN:
            ++s.pr_pn;
            break;
        case PrLabel::NE:
            ++s.pr_ne;
            break;
        case PrLabel::CL:
            ++s.pr_cl;
            break;
        }
        s.hunk_pa += v.pa_count;
        s.hunk_pn += v.pn_count;
        s.hunk_ne += v.ne_count;
        s.hunk_cc += v.cc_count;
        s.hunk_ee += v.ee_count;
        s.patch_total += v.pa_count + v.pn_count + v.ne_count + v.cc_count + v.ee_count;
        if (v.label == PrLabel::PA && v.integration_pct)
            integration.push_back(v.integration_pct->value());
    }
    long merged = s.pr_pa + s.pr_pn + s.pr_ne;
    if (merged > 0) {
        s.pct_pa = round_tenths(100.0 * static_cast<double>(s.pr_pa) / static_cast<double>(merged));
        s.pct_pn = round_tenths(100.0 * static_cast<double>(s.pr_pn) / static_cast<double>(merged));
        s.pct_ne = round_tenths(100.0 * static_cast<double>(s.pr_ne) / static_cast<double>(merged));
    }
    s.integration = integration_quartiles(std::move(integration));
    return s;
}

EvaluationReport evaluate(const std::vector<PrLabel>& predicted,
    const std::vector<PrLabel>& truth)
{
    if (predicted.size() != truth.size())
        throw Error(ErrorCode::LengthMismatch,
            "predicted and truth label sequences differ in length");
    if (predicted.empty())
        throw Error(ErrorCode::InvalidArgument, "cannot evaluate empty label sequences");

    EvaluationReport report;
    report.total = static_cast<long>(predicted.size());
    for (size_t i = 0; i < predicted.size(); ++i)
        ++report.confusion[eval_index(truth[i])][eval_index(predicted[i])];

    double n = static_cast<double>(report.total);
    long diag = 0;
    double p_e = 0.0;
    for (int c = 0; c < 3; ++c) {
        long tp = report.confusion[c][c];
        long row = 0, col = 0;
        for (int k = 0; k < 3; ++k) {
            row += report.confusion[c][k];
            col += report.confusion[k][c];
        }
        diag += tp;
        p_e += (static_cast<double>(row) / n) * (static_cast<double>(col) / n);

        long fp = col - tp;
        long fn = row - tp;
        long tn = report.total - tp - fp - fn;
        ClassMetrics m;
        m.accuracy = 100.0 * static_cast<double>(tp + tn) / n;
        m.precision = (tp + fp) > 0 ? 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        m.recall = (tp + fn) > 0 ? 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0
            ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
            : 0.0;
        report.per_class[c] = m;
    }
    double p_o = static_cast<double>(diag) / n;
    report.observed_agreement = round_tenths(100.0 * p_o);
    if (p_e < 1.0)
        report.cohens_kappa = round_3((p_o - p_e) / (1.0 - p_e));
    // p_e of 1 means both raters are constant and identical; chance-corrected
    // agreement is undefined there, so the field stays unset.

    ClassMetrics macro;
    for (int c = 0; c < 3; ++c) {
        macro.accuracy += report.per_class[c].accuracy;
        macro.precision += report.per_class[c].precision;
        macro.recall += report.per_class[c].recall;
        macro.f1 += report.per_class[c].f1;
        report.per_class[c].accuracy = round_tenths(report.per_class[c].accuracy);
        report.per_class[c].precision = round_tenths(report.per_class[c].precision);
        report.per_class[c].recall = round_tenths(report.per_class[c].recall);
        report.per_class[c].f1 = round_tenths(report.per_class[c].f1);
    }
    report.overall.accuracy = round_tenths(macro.accuracy / 3.0);
    report.overall.precision = round_tenths(macro.precision / 3.0);
    report.overall.recall = round_tenths(macro.recall / 3.0);
    report.overall.f1 = round_tenths(macro.f1 / 3.0);
    return report;
}

std::string render_csv(const std::vector<PrReportRow>& rows, int n)
{
    std::ostringstream out;
    out << "owner,repo,number,label,pa,pn,ne,cc,ee,integration_pct,n\n";
    for (const auto& row : rows) {
        const auto& v = row.verdict;
        out << csv_field(row.owner) << ',' << csv_field(row.repo) << ',' << row.number << ','
            << pr_label_name(v.label) << ',' << v.pa_count << ',' << v.pn_count << ','
            << v.ne_count << ',' << v.cc_count << ',' << v.ee_count << ',';
        if (v.integration_pct)
            out << v.integration_pct->str();
        out << ',' << n << '\n';
    }
    return out.str();
}

namespace {

json quartiles_to_json(const Quartiles& q)
{
    return json { { "q1", q.q1 }, { "median", q.median }, { "q3", q.q3 } };
}

Quartiles quartiles_from_json(const json& j)
{
    Quartiles q;
    q.q1 = j.at("q1").get<double>();
    q.median = j.at("median").get<double>();
    q.q3 = j.at("q3").get<double>();
    return q;
}

json metrics_to_json(const ClassMetrics& m)
{
    return json { { "accuracy", m.accuracy }, { "precision", m.precision },
        { "recall", m.recall }, { "f1", m.f1 } };
}

ClassMetrics metrics_from_json(const json& j)
{
    ClassMetrics m;
    m.accuracy = j.at("accuracy").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    return m;
}

json parse_json(const std::string& text, const char* what)
{
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCode::MalformedDocument, std::string("invalid JSON in ") + what);
    return j;
}

} // namespace

std::string summary_to_json(const CorpusSummary& s)
{
    json j;
    j["schema_version"] = 1;
    j["ngram"] = s.n;
    j["pr_counts"] = { { "pa", s.pr_pa }, { "pn", s.pr_pn }, { "ne", s.pr_ne }, { "cl", s.pr_cl } };
    j["pr_pct_merged"] = { { "pa", s.pct_pa }, { "pn", s.pct_pn }, { "ne", s.pct_ne } };
    j["hunk_counts"] = { { "pa", s.hunk_pa }, { "pn", s.hunk_pn }, { "ne", s.hunk_ne },
        { "cc", s.hunk_cc }, { "ee", s.hunk_ee } };
    if (s.integration)
        j["integration_quartiles"] = quartiles_to_json(*s.integration);
    j["snippet_total"] = s.snippet_total;
    j["patch_total"] = s.patch_total;
    return j.dump(2) + "\n";
}

CorpusSummary summary_from_json(const std::string& text)
{
    json j = parse_json(text, "summary");
    CorpusSummary s;
    s.n = j.at("ngram").get<int>();
    const auto& prc = j.at("pr_counts");
    s.pr_pa = prc.at("pa").get<long>();
    s.pr_pn = prc.at("pn").get<long>();
    s.pr_ne = prc.at("ne").get<long>();
    s.pr_cl = prc.at("cl").get<long>();
    const auto& pct = j.at("pr_pct_merged");
    s.pct_pa = pct.at("pa").get<double>();
    s.pct_pn = pct.at("pn").get<double>();
    s.pct_ne = pct.at("ne").get<double>();
    const auto& hc = j.at("hunk_counts");
    s.hunk_pa = hc.at("pa").get<long>();
    s.hunk_pn = hc.at("pn").get<long>();
    s.hunk_ne = hc.at("ne").get<long>();
    s.hunk_cc = hc.at("cc").get<long>();
    s.hunk_ee = hc.at("ee").get<long>();
    if (j.contains("integration_quartiles"))
        s.integration = quartiles_from_json(j.at("integration_quartiles"));
    s.snippet_total = j.at("snippet_total").get<long>();
    s.patch_total = j.at("patch_total").get<long>();
    return s;
}

std::string evaluation_to_json(const EvaluationReport& r)
{
    json j;
    j["schema_version"] = 1;
    j["labels"] = { "PA", "PN", "NE" };
    j["confusion"] = json::array();
    for (const auto& row : r.confusion)
        j["confusion"].push_back(row);
    json per;
    for (int c = 0; c < 3; ++c)
        per[pr_label_name(kEvalLabels[static_cast<size_t>(c)])]
            = metrics_to_json(r.per_class[static_cast<size_t>(c)]);
    j["per_class"] = per;
    j["overall"] = metrics_to_json(r.overall);
    j["overall_metric_averaging"] = "macro";
    j["observed_agreement"] = r.observed_agreement;
    if (r.cohens_kappa)
        j["cohens_kappa"] = *r.cohens_kappa;
    else
        j["cohens_kappa"] = nullptr;
    j["total"] = r.total;
    return j.dump(2) + "\n";
}

EvaluationReport evaluation_from_json(const std::string& text)
{
    json j = parse_json(text, "evaluation report");
    EvaluationReport r;
    const auto& conf = j.at("confusion");
    for (size_t row = 0; row < 3; ++row)
        for (size_t col = 0; col < 3; ++col)
            r.confusion[row][col] = conf.at(row).at(col).get<long>();
    for (size_t c = 0; c < 3; ++c)
        r.per_class[c] = metrics_from_json(j.at("per_class").at(pr_label_name(kEvalLabels[c])));
    r.overall = metrics_from_json(j.at("overall"));
    r.observed_agreement = j.at("observed_agreement").get<double>();
    if (!j.at("cohens_kappa").is_null())
        r.cohens_kappa = j.at("cohens_kappa").get<double>();
    r.total = j.at("total").get<long>();
    return r;
}

namespace {

// Minimal CSV reader: quoted fields, doubled quotes, CRLF tolerant.
std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(field);
            field.clear();
            any = true;
        } else if (c == '\n') {
            if (any || !field.empty() || !row.empty()) {
                row.push_back(field);
                rows.push_back(row);
            }
            field.clear();
            row.clear();
            any = false;
        } else if (c == '\r') {
            // swallowed; newline handling follows
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(field);
        rows.push_back(row);
    }
    return rows;
}

} // namespace

std::vector<LabeledPr> parse_label_csv(const std::string& text)
{
    auto rows = parse_csv(text);
    if (rows.empty())
        throw Error(ErrorCode::MalformedDocument, "label CSV is empty");
    const auto& header = rows.front();
    auto column = [&](const char* name) {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw Error(ErrorCode::MalformedDocument,
            std::string("label CSV is missing the '") + name + "' column");
    };
    size_t owner_col = column("owner");
    size_t repo_col = column("repo");
    size_t number_col = column("number");
    size_t label_col = column("label");

    std::vector<LabeledPr> out;
    for (size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        size_t needed = std::max({ owner_col, repo_col, number_col, label_col });
        if (row.size() <= needed)
            throw Error(ErrorCode::MalformedDocument,
                "label CSV row " + std::to_string(r + 1) + " has too few fields");
        LabeledPr item;
        item.owner = row[owner_col];
        item.repo = row[repo_col];
        try {
            item.number = std::stol(row[number_col]);
        } catch (...) {
            throw Error(ErrorCode::MalformedDocument,
                "label CSV row " + std::to_string(r + 1) + ": bad PR number '"
                    + row[number_col] + "'");
        }
        item.label = pr_label_from_name(row[label_col]);
        out.push_back(std::move(item));
    }
    return out;
}

EvaluationReport evaluate_label_files(const std::string& predictions_path,
    const std::string& truth_path)
{
    auto predictions = parse_label_csv(read_text_file(predictions_path));
    auto truth = parse_label_csv(read_text_file(truth_path));

    auto key = [](const LabeledPr& item) {
        return item.owner + "/" + item.repo + "#" + std::to_string(item.number);
    };
    std::map<std::string, PrLabel> truth_by_id;
    for (const auto& item : truth) {
        if (item.label == PrLabel::CL)
            continue;
        if (!truth_by_id.emplace(key(item), item.label).second)
            throw Error(ErrorCode::MalformedDocument, "duplicate PR id in truth: " + key(item));
    }
    std::vector<PrLabel> predicted_seq, truth_seq;
    std::set<std::string> seen;
    for (const auto& item : predictions) {
        if (item.label == PrLabel::CL)
            continue;
        auto it = truth_by_id.find(key(item));
        if (it == truth_by_id.end())
            throw Error(ErrorCode::UnknownLabel,
                "PR " + key(item) + " has no ground-truth row (or is CL there)");
        if (!seen.insert(key(item)).second)
            throw Error(ErrorCode::MalformedDocument,
                "duplicate PR id in predictions: " + key(item));
        predicted_seq.push_back(item.label);
        truth_seq.push_back(it->second);
    }
    if (seen.size() != truth_by_id.size())
        throw Error(ErrorCode::UnknownLabel,
            "ground truth lists pull requests absent from the predictions");
    return evaluate(predicted_seq, truth_seq);
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, "cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw Error(ErrorCode::IoFailure, "write failed: " + path);
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoFailure, "cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw Error(ErrorCode::IoFailure, "read failed: " + path);
    return buf.str();
}

} // namespace patchprov
