import { describe, expect, it } from 'vitest';

import { decode, encode, hello, submit } from '../src/protocol.js';

describe('decode', () => {
  it('accepts every known tag at version 1', () => {
    const frames = [
      '{"t":"welcome","v":1,"client_id":1,"snapshot":"{}","seq":0}',
      '{"t":"op","v":1,"seq":1,"origin_client":1,"client_op_id":1,"op":{"op":"remove","item_id":1}}',
      '{"t":"reject","v":1,"client_op_id":1,"reason":"CellFull"}',
      '{"t":"presence_b","v":1,"client_id":2,"cell":[0,0]}',
      '{"t":"residue","v":1,"cell":[3,3],"wear":0.0042}',
      '{"t":"error","v":1,"code":"bad_hello","detail":"x"}',
    ];
    for (const frame of frames) {
      expect(decode(frame).v).toBe(1);
    }
  });

  it('rejects malformed JSON, wrong versions, and unknown tags', () => {
    expect(() => decode('not json')).toThrow('not JSON');
    expect(() => decode('"just a string"')).toThrow('not an object');
    expect(() => decode('{"t":"op","v":2}')).toThrow('version');
    expect(() => decode('{"t":"banana","v":1}')).toThrow('unknown tag');
    expect(() => decode('{"v":1}')).toThrow('unknown tag');
  });
});

describe('builders', () => {
  it('hello carries the protocol version and space id', () => {
    const msg = hello('garden', 'ada');
    expect(msg).toEqual({
      t: 'hello',
      v: 1,
      proto_version: 1,
      space_id: 'garden',
      client_name: 'ada',
    });
    expect(decode(encode(msg)).t).toBe('hello');
  });

  it('submit wraps an op with a client op id', () => {
    const msg = submit(3, { op: 'set_time', time_of_day: 'dusk' });
    expect(JSON.parse(encode(msg))).toEqual({
      t: 'submit',
      v: 1,
      client_op_id: 3,
      op: { op: 'set_time', time_of_day: 'dusk' },
    });
  });
});
