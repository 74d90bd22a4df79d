use std::fmt::Write;

use maze_grover::{Direction, Maze, RoomCoord};

/// ASCII drawing with `+`, `-` and `|`. Rooms in `marked` get a `*`.
///
/// ```text
/// +---+---+
/// | *   * |
/// +---+   +
/// |     * |
/// +---+---+
/// ```
pub fn render(maze: &Maze, marked: &[RoomCoord]) -> String {
    let size = maze.size();
    let mut on_path = vec![false; size * size];
    for r in marked {
        on_path[r.row * size + r.col] = true;
    }
    let mut out = String::new();
    for row in 0..size {
        out.push('+');
        for col in 0..size {
            let open = maze.is_open(RoomCoord::new(row, col), Direction::North);
            out.push_str(if open { "   +" } else { "---+" });
        }
        out.push('\n');
        out.push('|');
        for col in 0..size {
            let room = RoomCoord::new(row, col);
            let mark = if on_path[row * size + col] { '*' } else { ' ' };
            let _ = write!(out, " {mark} ");
            out.push(if maze.is_open(room, Direction::East) { ' ' } else { '|' });
        }
        out.push('\n');
    }
    out.push('+');
    for _ in 0..size {
        out.push_str("---+");
    }
    out.push('\n');
    out
}
