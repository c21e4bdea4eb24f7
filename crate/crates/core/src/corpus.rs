//! Seeded synthetic corpus generator in the SARD annotation style: for each
//! feature it emits vulnerable samples whose FLAW comment sits directly above
//! the flawed statement, and fixed counterparts carrying FIX comments, no
//! vulnerable lines, and no detectable witness. Every vulnerable sample is
//! constructed to carry exactly one witness.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detect::FeatureId;
use crate::sample::{CodeSample, Label, ManifestRecord};

pub fn cwe_for(feature: FeatureId) -> &'static str {
    match feature {
        FeatureId::IBS => "CWE-131",
        FeatureId::BSB => "CWE-806",
        FeatureId::OE => "CWE-193",
        FeatureId::BO => "CWE-126",
        FeatureId::DF => "CWE-415",
        FeatureId::UAF => "CWE-416",
        FeatureId::BUW => "CWE-124",
        FeatureId::BUR => "CWE-127",
        FeatureId::RA | FeatureId::WA => "CWE-805",
    }
}

pub struct GeneratedSample {
    pub sample: CodeSample,
    pub feature: FeatureId,
}

/// One source file under construction; tracks the line the FLAW comment
/// annotates so the manifest's vulnerable line is exact.
struct FileBuilder {
    lines: Vec<String>,
    flaw_line: Option<u32>,
}

impl FileBuilder {
    fn new() -> Self {
        FileBuilder {
            lines: vec![
                "#include <stdio.h>".to_string(),
                "#include <stdlib.h>".to_string(),
                "#include <string.h>".to_string(),
                String::new(),
            ],
            flaw_line: None,
        }
    }

    fn push(&mut self, line: &str) {
        self.lines.push(line.to_string());
    }

    fn push_flawed(&mut self, comment: &str, stmt: &str, indent: &str) {
        self.lines.push(format!("{}/* FLAW: {} */", indent, comment));
        self.lines.push(format!("{}{}", indent, stmt));
        self.flaw_line = Some(self.lines.len() as u32);
    }

    fn push_fix(&mut self, comment: &str, indent: &str) {
        self.lines.push(format!("{}/* FIX: {} */", indent, comment));
    }

    fn finish(self, sample_id: &str, label: Label, feature: FeatureId) -> CodeSample {
        let mut source = self.lines.join("\n");
        source.push('\n');
        CodeSample {
            sample_id: sample_id.to_string(),
            path: format!("{}.c", sample_id),
            label,
            cwe: Some(cwe_for(feature).to_string()),
            vulnerable_lines: self.flaw_line.into_iter().collect(),
            source,
        }
    }
}

/// Deterministic corpus: `per_feature` vulnerable plus `per_feature` fixed
/// samples for each of the ten features, parameter-randomized by the seed.
pub fn generate_corpus(seed: u64, per_feature: u32) -> Vec<GeneratedSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut idx = 0u32;
    for feature in FeatureId::ALL {
        for k in 0..per_feature {
            for vulnerable in [true, false] {
                idx += 1;
                let tag = if vulnerable { "bad" } else { "good" };
                let id = format!(
                    "{:04}_{}_{}_{}",
                    idx,
                    feature.as_str().to_ascii_lowercase(),
                    k + 1,
                    tag
                );
                let fname = format!("test_{}_{}", feature.as_str().to_ascii_lowercase(), k + 1);
                let sample = build_sample(&mut rng, feature, vulnerable, &id, &fname);
                out.push(GeneratedSample { sample, feature });
            }
        }
    }
    out
}

pub fn manifest_records(samples: &[GeneratedSample]) -> Vec<ManifestRecord> {
    samples
        .iter()
        .map(|g| ManifestRecord {
            sample_id: g.sample.sample_id.clone(),
            path: g.sample.path.clone(),
            label: g.sample.label,
            cwe: g.sample.cwe.clone(),
            vulnerable_lines: g.sample.vulnerable_lines.clone(),
            feature: Some(g.feature.as_str().to_string()),
        })
        .collect()
}

fn build_sample(
    rng: &mut ChaCha8Rng,
    feature: FeatureId,
    vulnerable: bool,
    id: &str,
    fname: &str,
) -> CodeSample {
    let mut f = FileBuilder::new();
    let ind = "    ";
    let label = if vulnerable { Label::Vulnerable } else { Label::NonVulnerable };
    match feature {
        FeatureId::IBS => {
            let len: u32 = rng.gen_range(5..=20);
            f.push(&format!("void {}() {{", fname));
            f.push(&format!("{}char data[{}];", ind, len));
            if vulnerable {
                f.push_flawed(
                    &format!("writes {}*sizeof(int) bytes into a {}-byte buffer", len, len),
                    &format!("memset(data, 'C', {}*sizeof(int));", len),
                    ind,
                );
            } else {
                f.push_fix("the write is sized to the buffer", ind);
                f.push(&format!("{}memset(data, 'C', {});", ind, len));
            }
            f.push("}");
        }
        FeatureId::BSB => {
            let dlen: u32 = rng.gen_range(6..=16);
            let slen = dlen + 4 * rng.gen_range(1..=6);
            f.push(&format!("void {}() {{", fname));
            f.push(&format!("{}char dest[{}];", ind, dlen));
            f.push(&format!("{}char src[{}];", ind, slen));
            if vulnerable {
                f.push_flawed(
                    "copy length taken from the larger source buffer",
                    &format!("memcpy(dest, src, {});", slen),
                    ind,
                );
            } else {
                f.push_fix("copy length taken from the destination buffer", ind);
                f.push(&format!("{}memcpy(dest, src, {});", ind, dlen));
            }
            f.push("}");
        }
        FeatureId::OE => {
            let len: u32 = rng.gen_range(5..=20);
            f.push(&format!("void {}(char *input) {{", fname));
            f.push(&format!("{}char buf[{}];", ind, len));
            if vulnerable {
                f.push_flawed(
                    "the copy writes one byte past the end of the buffer",
                    &format!("strncpy(buf, input, {});", len + 1),
                    ind,
                );
            } else {
                f.push_fix("the copy stops at the buffer boundary", ind);
                f.push(&format!("{}strncpy(buf, input, {});", ind, len));
            }
            f.push("}");
        }
        FeatureId::BO => {
            let slen: u32 = rng.gen_range(5..=16);
            let n = slen + rng.gen_range(4..=12);
            let dlen = n + 8;
            f.push(&format!("void {}() {{", fname));
            f.push(&format!("{}char dest[{}];", ind, dlen));
            f.push(&format!("{}char src[{}];", ind, slen));
            if vulnerable {
                f.push_flawed(
                    &format!("reads {} bytes from a {}-byte source buffer", n, slen),
                    &format!("memcpy(dest, src, {});", n),
                    ind,
                );
            } else {
                f.push_fix("the read is limited to the source length", ind);
                f.push(&format!("{}memcpy(dest, src, {});", ind, slen));
            }
            f.push("}");
        }
        FeatureId::DF => {
            let bytes: u32 = 8 * rng.gen_range(1..=8);
            f.push(&format!("void {}() {{", fname));
            f.push(&format!("{}char *ptr = (char *)malloc({});", ind, bytes));
            f.push(&format!("{}free(ptr);", ind));
            if vulnerable {
                f.push_flawed("the buffer is freed a second time", "free(ptr);", ind);
            } else {
                f.push_fix("the pointer is reallocated before the second free", ind);
                f.push(&format!("{}ptr = (char *)malloc({});", ind, bytes));
                f.push(&format!("{}free(ptr);", ind));
            }
            f.push("}");
        }
        FeatureId::UAF => {
            let bytes: u32 = 8 * rng.gen_range(1..=8);
            f.push(&format!("void {}() {{", fname));
            f.push(&format!("{}char *ptr = (char *)malloc({});", ind, bytes));
            if vulnerable {
                f.push(&format!("{}free(ptr);", ind));
                f.push_flawed("read from the buffer after it was freed", "char tail = ptr[0];", ind);
            } else {
                f.push(&format!("{}char tail = ptr[0];", ind));
                f.push_fix("the buffer is freed only after its last use", ind);
                f.push(&format!("{}free(ptr);", ind));
            }
            f.push("}");
        }
        FeatureId::BUW => {
            let len: u32 = rng.gen_range(8..=32);
            f.push(&format!("void {}(int idx) {{", fname));
            f.push(&format!("{}char buf[{}];", ind, len));
            if vulnerable {
                f.push(&format!("{}if (idx < {}) {{", ind, len));
                f.push_flawed(
                    "the index is never checked for a negative value",
                    "buf[idx] = 'A';",
                    "        ",
                );
                f.push(&format!("{}}}", ind));
            } else {
                f.push(&format!("{}if (idx >= 0 && idx < {}) {{", ind, len));
                f.push_fix("both bounds of the index are checked", "        ");
                f.push("        buf[idx] = 'A';");
                f.push(&format!("{}}}", ind));
            }
            f.push("}");
        }
        FeatureId::BUR => {
            let len: u32 = rng.gen_range(8..=32);
            f.push(&format!("void {}(int idx) {{", fname));
            f.push(&format!("{}char buf[{}];", ind, len));
            f.push(&format!("{}char out = 'x';", ind));
            if vulnerable {
                f.push(&format!("{}if (idx < {}) {{", ind, len));
                f.push_flawed(
                    "the index is never checked for a negative value",
                    "out = buf[idx];",
                    "        ",
                );
                f.push(&format!("{}}}", ind));
            } else {
                f.push(&format!("{}if (idx >= 0 && idx < {}) {{", ind, len));
                f.push_fix("both bounds of the index are checked", "        ");
                f.push("        out = buf[idx];");
                f.push(&format!("{}}}", ind));
            }
            f.push("}");
        }
        FeatureId::RA => {
            let n: u32 = 8 * rng.gen_range(2..=16);
            f.push(&format!("void {}(char *buf) {{", fname));
            if vulnerable {
                f.push_flawed(
                    "unvalidated read of external input into the buffer",
                    &format!("fgets(buf, {}, stdin);", n),
                    ind,
                );
            } else {
                f.push_fix("the read length is validated by the caller", ind);
                f.push(&format!("{}fgets(buf, {}, stdin);", ind, n));
            }
            f.push("}");
        }
        FeatureId::WA => {
            f.push(&format!("void {}(char *dest, char *src, int n) {{", fname));
            if vulnerable {
                f.push_flawed(
                    "an unvalidated length drives the buffer write",
                    "memcpy(dest, src, n);",
                    ind,
                );
            } else {
                f.push_fix("the length is validated by the caller", ind);
                f.push(&format!("{}memcpy(dest, src, n);", ind));
            }
            f.push("}");
        }
    }
    f.finish(id, label, feature)
}
