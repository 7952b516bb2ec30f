//! Reference rows shared by the integration suites.
#![allow(dead_code)]

/// One row of the reference comparison: (r, d), the numerical minimal-surface
/// area and the closed-form areas of the two ruled seeds.
pub struct TableRow {
    pub r: f64,
    pub d: f64,
    pub numerical: f64,
    pub ruled2: f64,
    pub ruled1: f64,
}

pub const TABLE: [TableRow; 7] = [
    TableRow { r: 1.0, d: 1.0, numerical: 1.2793, ruled2: 1.280789275, ruled1: 1.280789275 },
    TableRow { r: 2.0, d: 1.0, numerical: 2.3665, ruled2: 2.366974371, ruled1: 1.861564196 },
    TableRow { r: 1.0, d: 2.0, numerical: 3.1753, ruled2: 3.180414498, ruled1: 4.316148066 },
    TableRow { r: 3.0, d: 1.0, numerical: 3.4916, ruled2: 3.491711893, ruled1: 2.595828045 },
    TableRow { r: 1.0, d: 3.0, numerical: 5.9310, ruled2: 5.936348433, ruled1: 9.325179471 },
    TableRow { r: 3.0, d: 2.0, numerical: 7.2582, ruled2: 7.259880701, ruled1: 6.208799631 },
    TableRow { r: 2.0, d: 3.0, numerical: 8.5226, ruled2: 8.527786411, ruled1: 10.22064879 },
];
