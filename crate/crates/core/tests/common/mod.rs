#![allow(dead_code)]

pub mod sim;

use stripecache::colfile::{Column, ColumnType, Row, Value};

/// Test-local PRNG so fixtures do not depend on any library generator.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }
}

pub fn random_type(rng: &mut Rng) -> ColumnType {
    match rng.below(3) {
        0 => ColumnType::Int64,
        1 => ColumnType::Float64,
        _ => ColumnType::Utf8,
    }
}

pub fn random_value(rng: &mut Rng, ty: ColumnType, null_pct: u64) -> Option<Value> {
    if rng.chance(null_pct) {
        return None;
    }
    Some(match ty {
        ColumnType::Int64 => match rng.below(4) {
            0 => Value::Int64(rng.next() as i64),
            _ => Value::Int64(rng.below(200) as i64 - 100),
        },
        ColumnType::Float64 => match rng.below(40) {
            0 => Value::Float64(f64::NAN),
            1 => Value::Float64(-0.0),
            2 => Value::Float64(f64::INFINITY),
            _ => Value::Float64((rng.below(2000) as f64 - 1000.0) / 8.0),
        },
        ColumnType::Utf8 => {
            let len = rng.below(10) as usize;
            let s: String = (0..len)
                .map(|_| match rng.below(30) {
                    0 => 'é',
                    1 => '日',
                    n => (b'a' + (n % 26) as u8) as char,
                })
                .collect();
            Value::Utf8(s)
        }
    })
}

pub struct RandomTable {
    pub schema: Vec<Column>,
    pub rows: Vec<Row>,
    pub stripe_rows: usize,
}

/// Random table with up to `max_cols` columns whose row count splits into at
/// most 5 stripes.
pub fn random_table(seed: u64, max_cols: u64, max_rows: u64) -> RandomTable {
    let mut rng = Rng::new(seed);
    let ncols = 1 + rng.below(max_cols) as usize;
    let schema: Vec<Column> = (0..ncols)
        .map(|i| Column::new(format!("c{i}"), random_type(&mut rng)))
        .collect();
    let nrows = 1 + rng.below(max_rows) as usize;
    let stripes = 1 + rng.below(5) as usize;
    let stripe_rows = nrows.div_ceil(stripes);
    let null_pct = [0, 5, 30, 100][rng.below(4) as usize];
    let rows = (0..nrows)
        .map(|_| {
            schema
                .iter()
                .map(|c| random_value(&mut rng, c.ty, null_pct))
                .collect()
        })
        .collect();
    RandomTable {
        schema,
        rows,
        stripe_rows,
    }
}
