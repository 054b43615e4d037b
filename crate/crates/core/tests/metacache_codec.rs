mod common;

use std::collections::HashSet;
use std::sync::Arc;

use common::{random_table, Rng};
use proptest::prelude::*;
use stripecache::colfile::*;
use stripecache::metacache::objbuf::validate_buffer;
use stripecache::metacache::*;

fn same_stats(view: StatsRef<'_>, owned: &ColumnStats) -> bool {
    if view.null_count != owned.null_count {
        return false;
    }
    match (&view.minmax, &owned.minmax) {
        (None, None) => true,
        (Some((vlo, vhi)), Some((lo, hi))) => vlo.same_as(&lo.as_ref()) && vhi.same_as(&hi.as_ref()),
        _ => false,
    }
}

/// Reads every field through the view accessors and compares with the source.
fn check_footer_view(v: &FooterView, f: &FileFooter) {
    assert_eq!(v.version(), f.version);
    assert_eq!(v.num_rows(), f.num_rows);
    assert_eq!(v.num_columns(), f.columns.len());
    for (i, c) in f.columns.iter().enumerate() {
        let col = v.column(i).unwrap();
        assert_eq!(col.name, c.name.as_bytes());
        assert_eq!(col.ty, c.ty);
        assert_eq!(v.column_type(i).unwrap(), c.ty);
        assert!(same_stats(v.file_stats(i).unwrap(), &f.file_stats[i]), "column {i} stats");
    }
    assert_eq!(v.num_stripes(), f.stripes.len());
    for (i, s) in f.stripes.iter().enumerate() {
        assert_eq!(v.stripe(i).unwrap(), *s);
    }
    assert!(v.stripe(f.stripes.len()).is_err());
    assert!(v.column(f.columns.len()).is_err());
}

fn check_stripe_footer_view(v: &StripeFooterView, sf: &StripeFooter) {
    assert_eq!(v.num_streams(), sf.streams.len());
    for (i, s) in sf.streams.iter().enumerate() {
        assert_eq!(v.stream(i).unwrap(), *s);
    }
    assert!(v.stream(sf.streams.len()).is_err());
}

fn check_stripe_index_view(v: &StripeIndexView, ix: &StripeIndex) {
    assert_eq!(v.num_columns(), ix.columns.len());
    assert_eq!(v.num_row_groups(), ix.num_row_groups as usize);
    for (c, col) in ix.columns.iter().enumerate() {
        assert!(same_stats(v.stripe_stats(c).unwrap(), &col.stripe_stats));
        for (g, rg) in col.row_groups.iter().enumerate() {
            let r = v.row_group(c, g).unwrap();
            assert_eq!(r.byte_offset, rg.byte_offset);
            assert!(same_stats(r.stats, &rg.stats), "column {c} group {g}");
        }
        assert!(v.row_group(c, col.row_groups.len()).is_err());
    }
}

struct Sections {
    footer: FileFooter,
    stripe_footers: Vec<StripeFooter>,
    indexes: Vec<StripeIndex>,
}

fn sections_of(seed: u64) -> Sections {
    let t = random_table(seed, 12, 2600);
    let written = write_file(&t.schema, &t.rows, t.stripe_rows).unwrap();
    let src = written.bytes.as_slice();
    let footer = written.footer;
    let stripe_footers = (0..footer.stripes.len())
        .map(|i| read_stripe_footer(src, &footer, i).unwrap())
        .collect();
    let indexes = (0..footer.stripes.len())
        .map(|i| read_stripe_index(src, &footer, i).unwrap())
        .collect();
    Sections {
        footer,
        stripe_footers,
        indexes,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn view_reads_reproduce_every_field(seed in any::<u64>()) {
        let s = sections_of(seed);
        let types = s.footer.column_types();

        let buf = encode_footer_buf(&s.footer);
        prop_assert_eq!(buf.len() % 8, 0);
        let v = decode_footer_view(buf.into_bytes().into()).unwrap();
        check_footer_view(&v, &s.footer);
        prop_assert_eq!(&v.to_footer().unwrap(), &s.footer);

        for sf in &s.stripe_footers {
            let v = decode_stripe_footer_view(encode_stripe_footer_buf(sf).into_bytes().into()).unwrap();
            check_stripe_footer_view(&v, sf);
        }
        for ix in &s.indexes {
            let v = decode_stripe_index_view(encode_stripe_index_buf(ix, &types).into_bytes().into()).unwrap();
            check_stripe_index_view(&v, ix);
            prop_assert_eq!(&v.to_stripe_index().unwrap(), ix);
        }
    }
}

#[test]
fn encoding_is_deterministic() {
    for seed in 0..50 {
        let s = sections_of(seed);
        let types = s.footer.column_types();
        assert_eq!(encode_footer_buf(&s.footer), encode_footer_buf(&s.footer.clone()));
        for ix in &s.indexes {
            assert_eq!(encode_stripe_index_buf(ix, &types), encode_stripe_index_buf(&ix.clone(), &types));
        }
    }
}

#[test]
fn encoding_is_injective_on_corpus() {
    let mut footers = Vec::new();
    let mut indexes = Vec::new();
    for seed in 0..300 {
        let s = sections_of(seed);
        let types = s.footer.column_types();
        for ix in s.indexes {
            indexes.push((ix, types.clone()));
        }
        footers.push(s.footer);
    }
    // pairwise distinct inputs must map to pairwise distinct buffers
    let mut seen = HashSet::new();
    let mut distinct = Vec::new();
    for f in &footers {
        if !distinct.contains(f) {
            distinct.push(f.clone());
            assert!(seen.insert(encode_footer_buf(f).into_bytes()), "collision for {f:?}");
        }
    }
    assert!(distinct.len() > 250);

    let mut seen = HashSet::new();
    let mut distinct: Vec<&(StripeIndex, Vec<ColumnType>)> = Vec::new();
    for ix in &indexes {
        if !distinct.contains(&ix) {
            distinct.push(ix);
            assert!(seen.insert(encode_stripe_index_buf(&ix.0, &ix.1).into_bytes()));
        }
    }
}

#[test]
fn footer_example_layout() {
    let stats = |lo, hi| ColumnStats {
        minmax: Some((Value::Int64(lo), Value::Int64(hi))),
        null_count: 0,
    };
    let f = FileFooter {
        version: 1,
        num_rows: 3,
        columns: vec![Column::new("a", ColumnType::Int64), Column::new("b", ColumnType::Int64)],
        stripes: vec![StripeInfo {
            stripe_offset: 4,
            index_len: 10,
            data_len: 20,
            footer_len: 5,
            num_rows: 3,
        }],
        file_stats: vec![stats(1, 3), stats(4, 6)],
    };
    // header + 2 column records + 1 stripe record + 2 stats records + padded heap
    let expected = 56 + 2 * 16 + 40 + 2 * 32 + 8;
    let buf = encode_footer_buf(&f);
    assert_eq!(buf.len(), expected);
    assert_eq!(buf.len(), 200);
    let v = decode_footer_view(buf.into_bytes().into()).unwrap();
    assert_eq!(v.stripe(0).unwrap().num_rows, 3);
}

fn corrupt(buf: &[u8], at: usize, bytes: &[u8]) -> Arc<[u8]> {
    let mut b = buf.to_vec();
    b[at..at + bytes.len()].copy_from_slice(bytes);
    b.into()
}

#[test]
fn validation_rejects_bad_headers() {
    let s = sections_of(7);
    let buf = encode_footer_buf(&s.footer).into_bytes();
    assert!(decode_footer_view(corrupt(&buf, 0, b"OBF2")).is_err());
    assert!(decode_footer_view(corrupt(&buf, 4, &[1])).is_err());
    let past_end = (buf.len() as u32 + 8).to_le_bytes();
    assert!(decode_footer_view(corrupt(&buf, 32, &past_end)).is_err());
    assert!(decode_footer_view(corrupt(&buf, 36, &3u32.to_le_bytes())).is_err());
    assert!(decode_footer_view(Arc::from(&buf[..40])).is_err());
    assert!(decode_stripe_index_view(buf.clone().into()).is_err());

    let arc: Arc<[u8]> = buf.into();
    assert!(validate_buffer(SectionKind::Footer, &arc).is_ok());
    assert!(validate_buffer(SectionKind::StripeFooter, &arc).is_err());
}

#[test]
fn random_corruption_never_panics() {
    let s = sections_of(11);
    let types = s.footer.column_types();
    let bufs = [
        encode_footer_buf(&s.footer).into_bytes(),
        encode_stripe_footer_buf(&s.stripe_footers[0]).into_bytes(),
        encode_stripe_index_buf(&s.indexes[0], &types).into_bytes(),
    ];
    let mut rng = Rng::new(99);
    for _ in 0..3000 {
        for buf in &bufs {
            let mut b = buf.clone();
            for _ in 0..1 + rng.below(4) {
                let i = rng.below(b.len() as u64) as usize;
                b[i] = rng.next() as u8;
            }
            let arc: Arc<[u8]> = b.into();
            // failures must surface as errors from decode or from accessors
            if let Ok(v) = decode_footer_view(arc.clone()) {
                let _ = v.to_footer();
            }
            if let Ok(v) = decode_stripe_footer_view(arc.clone()) {
                let _ = v.to_stripe_footer();
            }
            if let Ok(v) = decode_stripe_index_view(arc) {
                let _ = v.to_stripe_index();
            }
        }
    }
}

fn big_footer(stripes: usize) -> FileFooter {
    let mut off = 4;
    let stripes: Vec<StripeInfo> = (0..stripes)
        .map(|_| {
            let s = StripeInfo {
                stripe_offset: off,
                index_len: 10,
                data_len: 10,
                footer_len: 10,
                num_rows: 1,
            };
            off = s.end();
            s
        })
        .collect();
    FileFooter {
        version: 1,
        num_rows: stripes.len() as u64,
        columns: vec![Column::new("x", ColumnType::Int64)],
        stripes,
        file_stats: vec![ColumnStats {
            minmax: Some((Value::Int64(0), Value::Int64(0))),
            null_count: 0,
        }],
    }
}

#[test]
fn decode_cost_is_independent_of_buffer_size() {
    let small = encode_footer_buf(&big_footer(20)).into_bytes();
    let large = encode_footer_buf(&big_footer(27_000)).into_bytes();
    assert!(small.len() <= 1024);
    assert!(large.len() >= 1 << 20);

    let counters = CostCounters::default();
    for buf in [small, large] {
        let arc: Arc<[u8]> = buf.into();
        let before = (Arc::strong_count(&arc), counters_tuple(&counters));
        let v = counters.decode_footer(arc.clone()).unwrap();
        let after = counters_tuple(&counters);
        // exactly one decode, nothing else, and the view shares the caller's bytes
        assert_eq!(after, (before.1 .0, before.1 .1, before.1 .2, before.1 .3 + 1));
        assert!(Arc::ptr_eq(v.buffer(), &arc));
        assert_eq!(Arc::strong_count(&arc), before.0 + 1);
    }
}

fn counters_tuple(c: &CostCounters) -> (u64, u64, u64, u64) {
    let [a, b, e, d] = c.load();
    (a, b, e, d)
}
