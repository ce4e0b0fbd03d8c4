//! Builds the per-region search queries and hashtags from the bundled region
//! file, then shows how user locations map to regions.
//!
//! ```text
//! cargo run --example search_queries
//! ```

use std::path::Path;

use emolag::corpus::{
    generate_queries, load_region_specs, location_matches, DEFAULT_HASHTAG_PREFIXES,
    DEFAULT_QUERY_PREFIXES,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/regions/india.toml");
    let regions = load_region_specs(&path)?;
    for region in &regions {
        let q = generate_queries(region, DEFAULT_QUERY_PREFIXES, DEFAULT_HASHTAG_PREFIXES)?;
        println!(
            "{}: {} queries, {} hashtags",
            q.region,
            q.plain_queries.len(),
            q.hashtags.len()
        );
        for query in q.plain_queries.iter().take(3) {
            println!("  {query}");
        }
        println!("  {}", q.hashtags.join(" "));
    }

    for location in [
        "New Delhi, India",
        "Kochi, Kerala",
        "Mumbai",
        "Bhubaneswar, Orissa",
    ] {
        let hits: Vec<&str> = regions
            .iter()
            .filter(|r| location_matches(r, location))
            .map(|r| r.canonical_name.as_str())
            .collect();
        println!("{location:>22} -> {hits:?}");
    }
    Ok(())
}
