//! Resolves pattern-source flags into a list of bipolar patterns.

use bgn::mnist::{binarize_image, IdxDataset};
use bgn::{overlap_family, random_patterns, BipolarPattern};
use serde::Serialize;

use crate::args::{FamilyArgs, FamilyKind, SourceArgs};
use crate::error::{read_file, CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceEcho {
    Idx {
        images: String,
        labels: Option<String>,
        indices: Vec<usize>,
        threshold: u8,
    },
    Overlap {
        n_total: usize,
        n_shared: usize,
        n_distinct: usize,
        count: usize,
    },
    Random {
        n_total: usize,
        count: usize,
        pattern_seed: u64,
    },
}

#[derive(Debug, Clone)]
pub struct PatternSet {
    pub patterns: Vec<BipolarPattern>,
    /// Position of each pattern in its source (image index or family index).
    pub ids: Vec<usize>,
    /// Image width and height, when the source has one.
    pub shape: Option<(usize, usize)>,
    pub echo: SourceEcho,
}

impl PatternSet {
    pub fn neurons(&self) -> usize {
        self.patterns.first().map_or(0, BipolarPattern::len)
    }

    pub fn labels(&self) -> Vec<Option<u8>> {
        self.patterns.iter().map(BipolarPattern::label).collect()
    }
}

pub fn family_patterns(args: &FamilyArgs, default: FamilyKind) -> Result<PatternSet> {
    let kind = args.family.unwrap_or(default);
    let (patterns, echo) = match kind {
        FamilyKind::Overlap => (
            overlap_family(args.n_total, args.n_shared, args.n_distinct, args.count)
                .map_err(|e| CliError::Usage(e.to_string()))?,
            SourceEcho::Overlap {
                n_total: args.n_total,
                n_shared: args.n_shared,
                n_distinct: args.n_distinct,
                count: args.count,
            },
        ),
        FamilyKind::Random => {
            if args.n_total == 0 {
                return Err(CliError::Usage("--n-total must be at least 1".into()));
            }
            (
                random_patterns(args.n_total, args.count, args.pattern_seed)
                    .map_err(|e| CliError::Usage(e.to_string()))?,
                SourceEcho::Random {
                    n_total: args.n_total,
                    count: args.count,
                    pattern_seed: args.pattern_seed,
                },
            )
        }
    };
    Ok(PatternSet {
        ids: (0..patterns.len()).collect(),
        patterns,
        shape: None,
        echo,
    })
}

pub fn load_patterns(args: &SourceArgs) -> Result<PatternSet> {
    let Some(images_path) = &args.images else {
        if args.family.family.is_none() {
            return Err(CliError::Usage(
                "choose a pattern source: --images <idx-file> or --family".into(),
            ));
        }
        return family_patterns(&args.family, FamilyKind::Overlap);
    };

    let image_bytes = read_file(images_path)?;
    let label_bytes = args.labels.as_deref().map(read_file).transpose()?;
    let dataset = IdxDataset::parse(&image_bytes, label_bytes.as_deref()).map_err(|source| {
        CliError::Idx {
            path: images_path.clone(),
            source,
        }
    })?;

    let indices = if args.one_per_class {
        dataset.first_of_each_class()
    } else if args.indices.is_empty() {
        return Err(CliError::Usage(
            "--images needs --indices or --one-per-class".into(),
        ));
    } else {
        args.indices.clone()
    };

    let mut patterns = Vec::with_capacity(indices.len());
    let mut shape = None;
    for &i in &indices {
        let img = dataset.images.get(i).ok_or_else(|| {
            CliError::Mismatch(format!(
                "index {i} out of range for {} images",
                dataset.images.len()
            ))
        })?;
        shape = Some((img.width(), img.height()));
        let mut p = binarize_image(img, args.threshold);
        if let Some(labels) = &dataset.labels {
            p = p.with_label(labels[i]);
        }
        patterns.push(p);
    }
    if patterns.is_empty() {
        return Err(CliError::Mismatch("no patterns selected".into()));
    }

    Ok(PatternSet {
        patterns,
        ids: indices.clone(),
        shape,
        echo: SourceEcho::Idx {
            images: images_path.display().to_string(),
            labels: args.labels.as_ref().map(|p| p.display().to_string()),
            indices,
            threshold: args.threshold,
        },
    })
}
