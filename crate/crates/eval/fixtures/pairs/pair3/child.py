#!/usr/bin/env python
import rospy
import smach

from robot_skills import get_robot
from robot_smach_states.human_interaction import Say
from robot_smach_states.navigation import NavigateToWaypoint, NavigateToRoom
from robot_smach_states.navigation.decide import _DecideNavigateState
from robot_smach_states.perception import FindPeople


class FindPersonInArea(smach.StateMachine):
    """Decide between a waypoint and a room, go there and search for a person."""

    def __init__(self, robot, area="kitchen", name=None):
        smach.StateMachine.__init__(self, outcomes=["succeeded", "failed"])

        with self:
            smach.StateMachine.add("SAY_START",
                                   Say(robot, "I am going to look for {}".format(name or "someone")),
                                   transitions={"spoken": "DECIDE_NAVIGATE_STATE"})

            smach.StateMachine.add("DECIDE_NAVIGATE_STATE",
                                   _DecideNavigateState(robot, area),
                                   transitions={"waypoint": "NAVIGATE_TO_WAYPOINT",
                                                "room": "NAVIGATE_TO_ROOM",
                                                "none": "failed"})

            smach.StateMachine.add("NAVIGATE_TO_WAYPOINT",
                                   NavigateToWaypoint(robot, area),
                                   transitions={"arrived": "FIND_PEOPLE",
                                                "unreachable": "failed",
                                                "goal_not_defined": "failed"})

            smach.StateMachine.add("NAVIGATE_TO_ROOM",
                                   NavigateToRoom(robot, area),
                                   transitions={"arrived": "FIND_PEOPLE",
                                                "unreachable": "failed",
                                                "goal_not_defined": "failed"})

            smach.StateMachine.add("FIND_PEOPLE",
                                   FindPeople(robot, name=name, room=area),
                                   transitions={"found": "succeeded",
                                                "failed": "failed"})


if __name__ == "__main__":
    rospy.init_node("find_person_in_area")
    FindPersonInArea(get_robot("hero")).execute()
